use std::path::Path;

use raycut::eval::{self, CaseRow};
use raycut::phantom::{PhantomSpec, Shape};
use raycut::surface::export_obj;
use raycut::volume::{read_nrrd, write_nrrd, write_nrrd_mask, MaskVolume};
use raycut::{segment as run_segment, CostModel, Error, SegParams, Seed};
use serde_json::json;

use crate::{CliError, CostArg, EvalArgs, PhantomArgs, PhantomKind, SegmentArgs, ServeArgs};

type Result<T> = std::result::Result<T, CliError>;

fn triple<T: std::str::FromStr>(text: &str, what: &str) -> Result<[T; 3]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("{what} must be three comma-separated numbers, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|_| bad())?);
    }
    out.try_into().map_err(|_| bad())
}

fn parse_seed(args: &SegmentArgs) -> Result<Seed> {
    if args.seed_mm {
        return Ok(Seed::World(triple::<f64>(&args.seed, "seed")?));
    }
    let v = triple::<i64>(&args.seed, "seed")?;
    if v.iter().any(|&c| c < 0) {
        return Err(Error::SeedOutsideVolume.into());
    }
    Ok(Seed::Voxel(v.map(|c| c as usize)))
}

pub fn segment(args: &SegmentArgs) -> Result<()> {
    let cost = match (args.threshold, args.cost) {
        (Some(threshold), _) => CostModel::RegionThreshold { threshold },
        (None, CostArg::Region) => CostModel::Region,
        (None, CostArg::Deviation) => CostModel::Deviation,
    };
    let params = SegParams {
        subdiv: args.subdiv,
        samples: args.samples,
        max_radius_mm: args.radius_mm,
        delta_r: args.delta_r,
        mean_window: args.mean_window,
        cost,
    };
    params.validate()?;
    let seed = parse_seed(args)?;
    let vol = read_nrrd(&args.input)?;
    let seg = run_segment(&vol, seed, &params)?;
    write_nrrd_mask(&seg.mask, &args.out_mask)?;
    if let Some(path) = &args.out_mesh {
        export_obj(&seg.mesh, path)?;
    }

    let t = seg.timings;
    let volume = seg.volume_mm3();
    let (bmin, bmax) = seg.boundary_range();
    if args.json {
        let report = json!({
            "seed_voxel": seg.seed_voxel,
            "seed_mm": seg.seed_mm,
            "mean": seg.mu,
            "threshold": seg.threshold,
            "rays": seg.rays.rays(),
            "samples": seg.rays.samples(),
            "phase_ms": { "rays": t.rays, "graph": t.graph, "mincut": t.mincut, "voxelize": t.voxelize },
            "total_ms": t.total,
            "volume_mm3": volume,
            "volume_cm3": volume / 1000.0,
            "voxels": seg.mask.count(),
            "boundary": { "min": bmin, "max": bmax },
        });
        println!("{report:#}");
    } else {
        println!("seed       voxel {:?}, mean {:.3}", seg.seed_voxel, seg.mu);
        println!("rays       {:>10.2} ms", t.rays);
        println!("graph      {:>10.2} ms", t.graph);
        println!("mincut     {:>10.2} ms", t.mincut);
        println!("voxelize   {:>10.2} ms", t.voxelize);
        println!("total      {:>10.2} ms", t.total);
        println!("volume     {:.3} mm3 ({:.3} cm3), {} voxels", volume, volume / 1000.0, seg.mask.count());
        println!("boundary   min {bmin} max {bmax}");
    }
    Ok(())
}

fn read_mask(path: &Path) -> Result<MaskVolume> {
    Ok(MaskVolume::from_volume(&read_nrrd(path)?))
}

fn read_manifest(path: &str) -> Result<Vec<CaseRow>> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    let base = Path::new(path).parent().unwrap_or(Path::new(""));
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [id, pred, truth] = fields[..] else {
            return Err(Error::InvalidParameter(format!(
                "{path}:{}: expected `id,pred,truth`",
                n + 1
            ))
            .into());
        };
        let pred = read_mask(&base.join(pred))?;
        let truth = read_mask(&base.join(truth))?;
        rows.push(eval::case_report(&pred, &truth, id)?);
    }
    Ok(rows)
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let (rows, summary) = match (&args.manifest, &args.pred, &args.truth) {
        (Some(m), _, _) => {
            let rows = read_manifest(m)?;
            let summary = eval::summarize(&rows)?;
            (rows, Some(summary))
        }
        (None, Some(p), Some(t)) => {
            let row = eval::case_report(&read_mask(Path::new(p))?, &read_mask(Path::new(t))?, "1")?;
            (vec![row], None)
        }
        _ => return Err(CliError::Usage("either --manifest or --pred with --truth is required".into())),
    };
    if args.json {
        println!("{:#}", eval::report_json(&rows, summary.as_ref()));
    } else {
        print!("{}", eval::format_cases(&rows));
        if let Some(s) = &summary {
            println!();
            print!("{}", eval::format_summary(s));
        }
    }
    Ok(())
}

pub fn phantom(args: &PhantomArgs) -> Result<()> {
    let semi_axes = match args.kind {
        PhantomKind::Ellipsoid => triple::<f64>(&args.semi_axes, "semi-axes")?,
        PhantomKind::Sphere | PhantomKind::Shifted => [args.radius; 3],
    };
    let mut spec = PhantomSpec::centered(args.size, args.spacing, semi_axes)?;
    if args.kind == PhantomKind::Shifted {
        let offset = triple::<f64>(&args.offset_mm, "offset")?;
        let c = spec.shape.center();
        spec.shape = Shape::Ellipsoid {
            center: [c[0] + offset[0], c[1] + offset[1], c[2] + offset[2]],
            semi_axes,
        };
    }
    spec.inside = args.inside;
    spec.outside = args.outside;
    spec.noise_sigma = args.sigma;
    spec.rng_seed = args.rng_seed;
    write_nrrd(&spec.generate()?, &args.out)?;
    if let Some(path) = &args.out_truth {
        write_nrrd_mask(&spec.truth(), path)?;
    }
    Ok(())
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let vol = read_nrrd(&args.input)?;
    let truth = match &args.truth {
        Some(p) => Some(read_mask(Path::new(p))?),
        None => None,
    };
    let state = raycut_service::AppState::with_volume(vol, truth)?;
    eprintln!("listening on http://0.0.0.0:{}", args.port);
    raycut_service::serve_blocking(state, args.port).map_err(Error::from)?;
    Ok(())
}
