use dqa_core::datasets::{bars_and_stripes, write_pbm};

use crate::args::{GenDataArgs, GenKind};
use crate::error::{CliResult, OrUsage};

/// Write every pattern of the dataset to one multi-image PBM file.
pub fn cmd_gen_data(args: &GenDataArgs) -> CliResult<usize> {
    let data = match args.kind {
        GenKind::Bas => bars_and_stripes(args.rows, args.cols).or_usage("bars-and-stripes dataset")?,
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| dqa_core::Error::Io { path: dir.into(), source: e })?;
    }
    write_pbm(&data, args.rows, args.cols, &args.out)?;
    Ok(data.len())
}
