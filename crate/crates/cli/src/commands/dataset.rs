use super::CommandOutcome;
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_f64, write_csv};
use crate::CliError;

/// Writes the dataset with raw and scaled labels and a split column.
pub fn cmd_dataset(cfg: &RunConfig) -> Result<CommandOutcome, CliError> {
    let ds = cfg.dataset.load()?;
    ensure_dir(&cfg.out)?;
    let n = ds.n_features();
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..n).map(|c| format!("x{c}")));
    header.extend(["y".into(), "y_scaled".into(), "split".into()]);
    let rows: Vec<Vec<String>> = (0..ds.len())
        .map(|i| {
            let mut row = vec![i.to_string()];
            row.extend(ds.features[i].iter().map(|&v| fmt_f64(v)));
            row.push(fmt_f64(ds.labels[i]));
            row.push(fmt_f64(ds.target(i)));
            row.push(if ds.is_train(i) { "train" } else { "test" }.into());
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = write_csv(&cfg.out.join("dataset.csv"), &header, &rows)?;
    log::info!("{}: {} rows, {} train", path.display(), ds.len(), ds.train_idx.len());
    Ok(CommandOutcome {
        outputs: vec![path],
        failures: 0,
    })
}
