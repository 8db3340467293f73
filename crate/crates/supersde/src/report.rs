//! CSV reporting with a fixed schema:
//! `check_id,quantity,value,std_err,reference,tolerance,pass`.
//! Floats are printed with 17 significant digits so reruns are
//! byte-comparable.

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub check_id: String,
    pub quantity: String,
    pub value: f64,
    pub std_err: Option<f64>,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ReportRow {
    /// pass = (|value − reference| ≤ tolerance), evaluated exactly on the
    /// stored numbers.
    pub fn new(
        check_id: &str,
        quantity: &str,
        value: f64,
        std_err: Option<f64>,
        reference: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            check_id: check_id.to_string(),
            quantity: quantity.to_string(),
            value,
            std_err,
            reference,
            tolerance,
            pass: (value - reference).abs() <= tolerance,
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "check_id,quantity,value,std_err,reference,tolerance,pass";

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let std_err = r.std_err.map(fmt).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.check_id,
            r.quantity,
            fmt(r.value),
            std_err,
            fmt(r.reference),
            fmt(r.tolerance),
            r.pass
        ));
    }
    out
}

pub fn write_csv(path: &std::path::Path, rows: &[ReportRow]) -> std::io::Result<()> {
    std::fs::write(path, to_csv(rows))
}
