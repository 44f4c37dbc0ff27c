use std::fmt::Write as _;

use anyhow::Result;
use conic_rescale::image::{full_support_image, max_support_image};
use conic_rescale::instance::{gen_degenerate, gen_image_feasible, gen_kernel_feasible, ConicInstance};
use conic_rescale::kernel::{full_support_kernel, max_support_kernel};
use conic_rescale::report::{SolveOptions, SolveReport};
use rayon::prelude::*;

use crate::{BenchArgs, Mode, SupportKind, EXIT_SOLVED};

pub const HEADER: &str = "instance_id,mode,m,n,rho_known,status,fo_iters,rescalings,removals,residual,wall_ms";

fn instance_seed(seed: u64, mode: Mode, i: usize) -> u64 {
    let tag = match mode {
        Mode::Kernel => 0x6b,
        Mode::Image => 0x69,
    };
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (tag << 56) ^ i as u64
}

fn instance(args: &BenchArgs, mode: Mode, i: usize) -> Result<ConicInstance> {
    let seed = instance_seed(args.seed, mode, i);
    Ok(match (mode, args.support) {
        (Mode::Kernel, SupportKind::Full) => gen_kernel_feasible(args.m, args.n, args.rho, seed)?,
        (Mode::Image, SupportKind::Full) => gen_image_feasible(args.m, args.n, args.rho, seed)?,
        (_, SupportKind::Max) => gen_degenerate(args.m, args.n, (args.n / 2).max(1), seed)?,
    })
}

fn run(args: &BenchArgs, mode: Mode, i: usize) -> Result<String> {
    let inst = instance(args, mode, i)?;
    let rho = inst.known_rho.unwrap_or(0.0);
    let opts = SolveOptions { known_rho: inst.known_rho, ..args.limits.options(None) };
    let a = &inst.a;
    let report: SolveReport = match (mode, args.support) {
        (Mode::Kernel, SupportKind::Full) => full_support_kernel(a, &opts)?.report,
        (Mode::Kernel, SupportKind::Max) => max_support_kernel(a, &opts)?.report,
        (Mode::Image, SupportKind::Full) => full_support_image(a, &opts)?.report,
        (Mode::Image, SupportKind::Max) => max_support_image(a, &opts)?.report,
    };
    let mode = match mode {
        Mode::Kernel => "kernel",
        Mode::Image => "image",
    };
    let wall = if args.timing { format!("{:.3}", report.wall_ms) } else { "0".into() };
    Ok(format!(
        "{i},{mode},{},{},{rho},{},{},{},{},{:.6e},{wall}",
        a.rows(),
        a.cols(),
        report.status.as_str(),
        report.fo_iters,
        report.rescalings,
        report.removals,
        report.residual,
    ))
}

pub fn bench(args: &BenchArgs) -> Result<u8> {
    let jobs: Vec<(Mode, usize)> = args.modes.iter().flat_map(|&m| (0..args.count).map(move |i| (m, i))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs.unwrap_or(0)).build()?;
    let rows: Vec<String> = pool.install(|| jobs.par_iter().map(|&(m, i)| run(args, m, i)).collect::<Result<_>>())?;
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    writeln!(out, "{HEADER}")?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    print!("{out}");
    Ok(EXIT_SOLVED)
}
