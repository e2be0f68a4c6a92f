use std::path::Path;

use rsbench::atomic::write_atomic;

use crate::error::CliResult;
use crate::manifest::Recorder;

/// Buffers CSV rows and writes them atomically with a header row.
pub struct CsvReport {
    name: &'static str,
    columns: &'static [&'static str],
    writer: csv::Writer<Vec<u8>>,
}

impl CsvReport {
    pub fn new(name: &'static str, columns: &'static [&'static str]) -> CliResult<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(columns)?;
        Ok(Self { name, columns, writer })
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        debug_assert_eq!(fields.len(), self.columns.len());
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn write(self, out_dir: &Path, rec: &mut Recorder) -> CliResult<()> {
        let bytes = self.writer.into_inner().map_err(|e| e.into_error())?;
        write_atomic(out_dir.join(self.name), &bytes)?;
        rec.csv_output(self.name, self.columns);
        Ok(())
    }
}

/// Fixed-precision float formatting for reports.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}
