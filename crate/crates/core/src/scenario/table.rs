use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Columnar result. `header` lists every available column; `default_columns` is the
/// layout written when no selection is given.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub default_columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str], default_columns: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            default_columns: default_columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(v) => *v,
                    Cell::Bool(b) => f64::from(u8::from(*b)),
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(&format!("{:.*}", (11 - exp) as usize, x))
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_number(*v),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

/// CSV text of `table` with the requested columns in the requested order.
pub fn emit_plot_data(table: &Table, columns: Option<&[String]>) -> Result<String> {
    let names: &[String] = columns.unwrap_or(&table.default_columns);
    let idx: Vec<usize> = names
        .iter()
        .map(|n| table.column(n).ok_or_else(|| Error::UnknownColumn(n.clone())))
        .collect::<Result<_>>()?;
    let mut out = names.join(",");
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = idx.iter().map(|&i| render(&row[i])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}
