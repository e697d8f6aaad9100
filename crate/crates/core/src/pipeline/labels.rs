use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::label::SubjectDay;

/// Parse a `name,subject,day,label` table into a name lookup.
pub fn parse_label_table(text: &str) -> Result<HashMap<String, SubjectDay>> {
    let mut out = HashMap::new();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("label file is empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["name", "subject", "day", "label"] {
        return Err(Error::Parse(format!("label file header must be `name,subject,day,label`, got `{header}`")));
    }
    for line in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(Error::Parse(format!("label row `{line}` needs 4 fields")));
        }
        let day = f[2]
            .parse()
            .map_err(|_| Error::Parse(format!("day `{}` is not a nonnegative integer", f[2])))?;
        let id = SubjectDay::new(f[1], day, f[3].parse()?);
        if out.insert(f[0].to_string(), id).is_some() {
            return Err(Error::Parse(format!("label file names `{}` twice", f[0])));
        }
    }
    Ok(out)
}

/// Distance CSV whose header holds plain names, relabelled through a label table.
pub fn labeled_matrix(distance_csv: &str, labels: &HashMap<String, SubjectDay>) -> Result<DistanceMatrix> {
    let mut rewritten = String::with_capacity(distance_csv.len());
    let mut header_done = false;
    for line in distance_csv.lines() {
        if !header_done && !line.trim().is_empty() && !line.starts_with('#') {
            let ids = line
                .split(',')
                .map(|name| {
                    labels
                        .get(name.trim())
                        .map(|id| id.to_string())
                        .ok_or_else(|| Error::Parse(format!("no label for `{}`", name.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            rewritten.push_str(&ids.join(","));
            header_done = true;
        } else {
            rewritten.push_str(line);
        }
        rewritten.push('\n');
    }
    DistanceMatrix::from_csv(&rewritten)
}

/// Read a distance CSV, optionally naming its rows through a label file.
pub fn read_matrix(path: &Path, labels: Option<&Path>) -> Result<DistanceMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let dm = match labels {
        Some(lp) => {
            let table = fs::read_to_string(lp).map_err(|e| Error::io(lp, e))?;
            labeled_matrix(&text, &parse_label_table(&table)?)?
        }
        None => DistanceMatrix::from_csv(&text)?,
    };
    dm.values.check_dissimilarity()?;
    Ok(dm)
}
