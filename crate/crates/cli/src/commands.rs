use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use magloc_core::capacity::capacity;
use magloc_core::eval::{run_grid_eval, sensor_rotation};
use magloc_core::geometry::Vec2;
use magloc_core::io::{
    parse_sample_line, read_samples, write_estimate_row, write_samples, SampleLine, ESTIMATE_HEADER,
};
use magloc_core::solver::calibrate;
use magloc_core::synth::{synthesize, Trajectory, TrajectorySpec};
use magloc_core::tracker::Tracker;

use crate::args::{CapacityArgs, Cli, Command, EvalGridArgs, InputArgs, SimulateArgs};
use crate::config::AppConfig;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli)?;
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(&cfg, a, &output_path(&cli, &cfg)),
        Command::Calibrate(a) => cmd_calibrate(&mut cfg, a, &cli),
        Command::Track(a) => cmd_track(&cfg, a, &output_path(&cli, &cfg)),
        Command::EvalGrid(a) => cmd_eval_grid(&cfg, a, &output_path(&cli, &cfg)),
        Command::Capacity(a) => cmd_capacity(a),
        Command::ShowConfig => {
            let mut out = open_output(&output_path(&cli, &cfg))?;
            out.write_all(cfg.to_flat_text().as_bytes())
                .and_then(|_| out.flush())
                .map_err(CliError::io("writing config"))
        }
    }
}

/// File, then environment, then `--seed` and `--preset`.
pub fn load_config(cli: &Cli) -> Result<AppConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(CliError::io(format!("reading {}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = AppConfig::parse(&text, std::env::vars())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.preset {
        cfg.apply_preset(p);
    }
    Ok(cfg)
}

fn output_path(cli: &Cli, cfg: &AppConfig) -> String {
    cli.output
        .clone()
        .or_else(|| cfg.paths.output.clone())
        .unwrap_or_else(|| "-".into())
}

fn open_output(path: &str) -> Result<Box<dyn Write>> {
    if path == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = File::create(path).map_err(CliError::io(format!("creating {path}")))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn open_input(path: &str) -> Result<Box<dyn BufRead>> {
    if path == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    let f = File::open(path).map_err(CliError::io(format!("opening {path}")))?;
    Ok(Box::new(BufReader::new(f)))
}

fn input_path(a: &InputArgs, cfg: &AppConfig) -> Option<String> {
    a.input.clone().or_else(|| cfg.paths.input.clone())
}

fn floats(s: &str, sep: char, what: &str) -> Result<Vec<f64>> {
    s.split(sep)
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: `{v}` is not a number")))
        })
        .collect()
}

fn exactly<const N: usize>(v: Vec<f64>, what: &str) -> Result<[f64; N]> {
    v.try_into()
        .map_err(|_| CliError::Usage(format!("{what} expects {N} comma-separated numbers")))
}

pub fn parse_trajectory(a: &SimulateArgs) -> Result<Trajectory> {
    if let Some(s) = &a.at {
        let [x, y] = exactly(floats(s, ',', "--at")?, "--at")?;
        return Ok(Trajectory::Static(Vec2::new(x, y)));
    }
    if let Some(s) = &a.linear {
        let [x0, y0, x1, y1] = exactly(floats(s, ',', "--linear")?, "--linear")?;
        return Ok(Trajectory::Linear {
            start: Vec2::new(x0, y0),
            end: Vec2::new(x1, y1),
        });
    }
    if let Some(s) = &a.circle {
        let v = floats(s, ',', "--circle")?;
        let (v, phase0) = match v.len() {
            4 => (v, 0.0),
            5 => (v[..4].to_vec(), v[4]),
            _ => return Err(CliError::Usage("--circle expects CX,CY,R,RATE[,PHASE]".into())),
        };
        return Ok(Trajectory::Circular {
            center: Vec2::new(v[0], v[1]),
            radius: v[2],
            angular_rate: v[3],
            phase0,
        });
    }
    if let Some(s) = &a.waypoints {
        let pts = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                let [t, x, y] = exactly(floats(p, ':', "--waypoints")?, "each waypoint")?;
                Ok((t, Vec2::new(x, y)))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Trajectory::Waypoints(pts));
    }
    Err(CliError::Usage(
        "simulate needs one of --at, --linear, --circle, --waypoints".into(),
    ))
}

fn cmd_simulate(cfg: &AppConfig, a: &SimulateArgs, out_path: &str) -> Result<()> {
    let rig = cfg.rig_config();
    let duration = a.duration.unwrap_or(cfg.sim.duration);
    let traj = TrajectorySpec::new(parse_trajectory(a)?, duration)?;
    let setup = cfg.source_setup();
    let sources = rig.sources(setup.m_eff20, setup.m_eff30, setup.phase20, setup.phase30)?;
    let rot = sensor_rotation(&setup, cfg.seed);
    let samples = synthesize(&rig, &sources, &traj, &rot, &cfg.noise_model(), duration)?;

    let mut comments = vec!["magloc simulate".to_string()];
    comments.extend(cfg.provenance());
    let mut out = open_output(out_path)?;
    write_samples(&mut out, &comments, &samples)
        .and_then(|_| out.flush())
        .map_err(CliError::io(format!("writing {out_path}")))?;
    eprintln!("{} samples, {duration} s", samples.len());
    Ok(())
}

fn cmd_calibrate(cfg: &mut AppConfig, a: &InputArgs, cli: &Cli) -> Result<()> {
    let input = input_path(a, cfg).ok_or_else(|| CliError::Usage("calibrate needs an INPUT path or `-`".into()))?;
    let mut text = String::new();
    open_input(&input)?
        .read_to_string(&mut text)
        .map_err(CliError::io(format!("reading {input}")))?;
    let (samples, bad) = read_samples(&text);
    if bad > 0 {
        eprintln!("warning: {bad} malformed rows skipped");
    }
    let cal = calibrate(&samples, &cfg.rig_config(), &cfg.filter_spec()?)?;
    cfg.rig.k20 = Some(cal.k20);
    cfg.rig.k30 = Some(cal.k30);

    let target = cli
        .output
        .clone()
        .or_else(|| cli.config.as_ref().map(|p| p.display().to_string()))
        .ok_or_else(|| CliError::Usage("calibrate needs --output or --config to know where to write".into()))?;
    if target != "-" && Path::new(&target).exists() && !cli.force {
        return Err(CliError::OutputExists(target));
    }
    let mut out = open_output(&target)?;
    write!(
        out,
        "# magloc configuration\n# calibration residual_spread={:.6} windows={} samples={}\n{}",
        cal.residual_spread,
        cal.windows,
        cal.samples_used,
        cfg.to_flat_text()
    )
    .and_then(|_| out.flush())
    .map_err(CliError::io(format!("writing {target}")))?;
    eprintln!(
        "k20={:e} k30={:e} residual_spread={:.4} ({} windows)",
        cal.k20, cal.k30, cal.residual_spread, cal.windows
    );
    Ok(())
}

fn cmd_track(cfg: &AppConfig, a: &InputArgs, out_path: &str) -> Result<()> {
    let rig = cfg.rig_config();
    let mut tracker = Tracker::new(&rig, &cfg.filter_spec()?, cfg.solver_state())?;
    let input = input_path(a, cfg).unwrap_or_else(|| "-".into());
    let live = input == "-";
    let reader = open_input(&input)?;
    let mut out = open_output(out_path)?;
    let werr = CliError::io(format!("writing {out_path}"));

    let mut head = String::from("# magloc track\n");
    for c in cfg.provenance() {
        head.push_str(&format!("# {c}\n"));
    }
    head.push_str(ESTIMATE_HEADER);
    head.push('\n');
    if let Err(e) = out.write_all(head.as_bytes()).and_then(|_| out.flush()) {
        return Err(werr(e));
    }

    let (mut rows, mut bad) = (0usize, 0usize);
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(CliError::io(format!("reading {input}")))?;
        match parse_sample_line(&line) {
            SampleLine::Sample(s) => {
                if let Some(e) = tracker.step(s)? {
                    let res =
                        write_estimate_row(&mut out, s.t, &e).and_then(|_| if live { out.flush() } else { Ok(()) });
                    if let Err(e) = res {
                        return Err(CliError::io(format!("writing {out_path}"))(e));
                    }
                    rows += 1;
                }
            }
            SampleLine::Malformed(why) => {
                bad += 1;
                eprintln!("warning: line {}: {why}; skipped", n + 1);
            }
            SampleLine::Blank | SampleLine::Comment | SampleLine::Header => {}
        }
    }
    out.flush().map_err(CliError::io(format!("writing {out_path}")))?;
    eprintln!("{rows} estimates, {bad} malformed rows skipped");
    Ok(())
}

fn cmd_eval_grid(cfg: &AppConfig, a: &EvalGridArgs, out_path: &str) -> Result<()> {
    let report = run_grid_eval(
        &cfg.rig_config(),
        &cfg.filter_spec()?,
        &cfg.source_setup(),
        &cfg.grid_spec(),
        &cfg.noise_model(),
        &cfg.eval_options(),
        cfg.seed,
    )?;
    let mut out = open_output(out_path)?;
    let mut head = String::new();
    for c in cfg.provenance() {
        head.push_str(&format!("# {c}\n"));
    }
    for l in cfg.embedded_lines() {
        head.push_str(&l);
        head.push('\n');
    }
    out.write_all(head.as_bytes())
        .and_then(|_| report.write_csv(&mut out, &cfg.eval.label))
        .and_then(|_| out.flush())
        .map_err(CliError::io(format!("writing {out_path}")))?;

    if let Some(p) = &a.scatter {
        let f = File::create(p).map_err(CliError::io(format!("creating {}", p.display())))?;
        let mut w = BufWriter::new(f);
        report
            .write_scatter(&mut w)
            .and_then(|_| w.flush())
            .map_err(CliError::io(format!("writing {}", p.display())))?;
    }
    let line = format!("{}: {:.4} ± {:.4} cm", cfg.eval.label, report.mae_mean, report.mae_std);
    if out_path == "-" {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
    Ok(())
}

fn cmd_capacity(a: &CapacityArgs) -> Result<()> {
    println!("{}", capacity(a.throughput, a.rate, a.bytes)?);
    Ok(())
}
