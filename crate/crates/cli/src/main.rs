//! `orthobasis` command-line tool.
//!
//! All indices on this surface are 0-based. Matrices travel as MTX1 text,
//! images as PGM, messages as 0/1 text bitmaps, keys as JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ndarray::Array2;
use orthobasis::formats::{load_bitmap, load_gray, load_mtx, load_pgm, save_bitmap, save_gray, save_pgm, to_gray8, write_mtx};
use orthobasis::stego::{bit_error_rate, decode_bits, encode_bits, flatten, unflatten, StegoKey, DEFAULT_STRENGTH};
use orthobasis::verify::{full_report, generator_report, wavelet_report};
use orthobasis::{
    atlas, band_reconstruction, detect4, dwt2, embed4, energy, forward_2d, idwt2, inverse_2d, Band, DwtCoeffs, FilterBank,
    GeneratorKind,
};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "orthobasis", version, about = "Basis-image transforms, wavelet bands and four-message embedding")]
struct Cli {
    /// Seed for the random generator; overrides the config file
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON parameter file, e.g. {"generator":"wht","n":2,"seed":0,"p":8,"strength":16.0}
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (directory for embed/detect). MTX1 outputs go to stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render all N² basis images as an N²×N² PGM grid, tile (k,p) at rows k·N
    Atlas {
        #[arg(long)]
        generator: Option<GeneratorKind>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// 2D transform G = UᵀFU of a square image (.pgm or .mtx)
    Transform {
        input: PathBuf,
        #[arg(long)]
        generator: Option<GeneratorKind>,
        /// Apply F = UGUᵀ instead
        #[arg(long)]
        inverse: bool,
    },
    /// Single-level 2D DWT; writes [[cA,cH],[cV,cD]] as one MTX1 matrix
    Dwt {
        input: PathBuf,
        /// haar or db2
        #[arg(long)]
        filter: Option<String>,
        /// Reconstruct an image from a block-layout coefficient matrix
        #[arg(long)]
        inverse: bool,
    },
    /// Reconstruct the image part carried by one band of block-layout coefficients
    Band {
        coeffs: PathBuf,
        /// A, H, V or D
        #[arg(long)]
        band: Band,
        #[arg(long)]
        filter: Option<String>,
    },
    /// Embed four p×p bitmaps M1..M4; writes f1m.pgm (M1, M3) and f2m.pgm (M2, M4)
    Embed {
        #[arg(num_args = 4, value_names = ["M1", "M2", "M3", "M4"], required = true)]
        messages: Vec<PathBuf>,
        #[arg(long)]
        generator: Option<GeneratorKind>,
        #[arg(long)]
        strength: Option<f64>,
    },
    /// Detect the two messages of one stego image (component 1 → M1,M3; 2 → M2,M4)
    Detect {
        stego: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long)]
        generator: Option<GeneratorKind>,
        /// Reference bitmaps for a BER report; any bit error fails the run
        #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
        expect: Option<Vec<PathBuf>>,
    },
    /// Run the invariant suites; without --generator every generator at N ∈ {2,4,8,16}
    Verify {
        #[arg(long)]
        generator: Option<GeneratorKind>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    generator: Option<GeneratorKind>,
    n: Option<usize>,
    seed: Option<u64>,
    p: Option<usize>,
    strength: Option<f64>,
    filter: Option<String>,
}

struct Params {
    config: RunConfig,
    seed: u64,
    out: Option<PathBuf>,
}

impl Params {
    fn generator(&self, flag: Option<GeneratorKind>) -> Result<GeneratorKind> {
        flag.or(self.config.generator).context("no generator given (--generator or config)")
    }

    fn filter(&self, flag: Option<String>) -> Result<FilterBank> {
        let name = flag.or_else(|| self.config.filter.clone()).unwrap_or_else(|| "haar".into());
        Ok(FilterBank::by_name(&name)?)
    }

    fn out(&self) -> Result<&Path> {
        self.out.as_deref().context("--out is required for this command")
    }

    fn stego_key(&self, generator: Option<GeneratorKind>, p: usize, strength: Option<f64>) -> Result<StegoKey> {
        if let Some(cp) = self.config.p {
            if cp != p {
                bail!("config p = {cp} but messages are {p}x{p}");
            }
        }
        let mut key = StegoKey::new(
            self.generator(generator)?,
            self.seed,
            p,
            strength.or(self.config.strength).unwrap_or(DEFAULT_STRENGTH),
        );
        key.n = self.config.n.unwrap_or(2);
        key.validate()?;
        Ok(key)
    }

    fn emit_mtx(&self, m: &Array2<f64>) -> Result<()> {
        match &self.out {
            Some(path) => save_gray(path, &m.view())?,
            None => write_mtx(std::io::stdout().lock(), &m.view())?,
        }
        Ok(())
    }
}

fn load_square(path: &Path) -> Result<Array2<f64>> {
    let f = load_gray(path).with_context(|| format!("reading {}", path.display()))?;
    if f.nrows() != f.ncols() || f.is_empty() {
        bail!("{} is {}x{}, expected a non-empty square image", path.display(), f.nrows(), f.ncols());
    }
    Ok(f)
}

fn run(cli: Cli) -> Result<bool> {
    let config: RunConfig = match &cli.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
            .with_context(|| format!("parsing {}", path.display()))?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let params = Params { config, seed, out: cli.out };

    match cli.command {
        Command::Atlas { generator, n } => {
            let n = n.or(params.config.n).context("no order given (--n or config)")?;
            let u = params.generator(generator)?.build(n, seed)?;
            let out = params.out()?;
            save_pgm(out, &to_gray8(&atlas(&u).view()).view())?;
            println!("wrote {}x{} atlas to {}", n * n, n * n, out.display());
            Ok(true)
        }
        Command::Transform { input, generator, inverse } => {
            let f = load_square(&input)?;
            let u = params.generator(generator)?.build(f.nrows(), seed)?;
            let g = if inverse { inverse_2d(&u, &u, &f.view())? } else { forward_2d(&u, &u, &f.view())? };
            eprintln!("energy in {:.6e}, out {:.6e}", energy(&f), energy(&g));
            params.emit_mtx(&g)?;
            Ok(true)
        }
        Command::Dwt { input, filter, inverse } => {
            let fb = params.filter(filter)?;
            let f = load_square(&input)?;
            let out = if inverse {
                idwt2(&fb, &DwtCoeffs::from_block_layout(&f.view())?)?
            } else {
                dwt2(&fb, &f.view())?.to_block_layout()
            };
            params.emit_mtx(&out)?;
            Ok(true)
        }
        Command::Band { coeffs, band, filter } => {
            let fb = params.filter(filter)?;
            let g = DwtCoeffs::from_block_layout(&load_mtx(&coeffs)?.view())?;
            params.emit_mtx(&band_reconstruction(&fb, &g, band)?)?;
            Ok(true)
        }
        Command::Embed { messages, generator, strength } => {
            let bits: Vec<Array2<u8>> =
                messages.iter().map(|m| load_bitmap(m).with_context(|| format!("reading {}", m.display()))).collect::<Result<_>>()?;
            let (p, pc) = bits[0].dim();
            if p != pc || bits.iter().any(|b| b.dim() != (p, p)) {
                bail!("messages must all be the same square shape");
            }
            let key = params.stego_key(generator, p, strength)?;
            let u = key.generator()?;
            let m = [0, 1, 2, 3].map(|i| encode_bits(&bits[i], key.strength));
            let (f1, f2) = embed4(&u, &m)?;
            let dir = params.out()?;
            fs::create_dir_all(dir)?;
            for (name, f) in [("f1m.pgm", &f1), ("f2m.pgm", &f2)] {
                save_pgm(dir.join(name), &to_gray8(&flatten(f).view()).view())?;
            }
            println!("embedded four {p}x{p} messages with {} at strength {} into {}", key.generator, key.strength, dir.display());
            Ok(true)
        }
        Command::Detect { stego, which, generator, expect } => {
            let img = load_pgm(&stego).with_context(|| format!("reading {}", stego.display()))?.mapv(f64::from);
            let n = params.config.n.unwrap_or(2);
            if img.nrows() % n != 0 || img.nrows() != img.ncols() {
                bail!("stego image {}x{} does not tile into {n}x{n} square blocks", img.nrows(), img.ncols());
            }
            let key = params.stego_key(generator, img.nrows() / n, None)?;
            let u = key.generator()?;
            let (a, b) = detect4(&u, &unflatten(&img.view(), n)?, which as usize)?;
            let found = [decode_bits(&a.view()), decode_bits(&b.view())];
            let labels = if which == 1 { ["m1", "m3"] } else { ["m2", "m4"] };
            match &params.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    for (label, bits) in labels.iter().zip(&found) {
                        save_bitmap(dir.join(format!("{label}.txt")), &bits.view())?;
                    }
                    println!("wrote {}.txt and {}.txt to {}", labels[0], labels[1], dir.display());
                }
                None => {
                    for (label, bits) in labels.iter().zip(&found) {
                        println!("{label}:");
                        for row in bits.rows() {
                            println!("{}", row.iter().map(|b| if *b != 0 { '1' } else { '0' }).collect::<String>());
                        }
                    }
                }
            }
            let Some(refs) = expect else { return Ok(true) };
            let mut ok = true;
            for ((label, bits), path) in labels.iter().zip(&found).zip(&refs) {
                let ber = bit_error_rate(&load_bitmap(path)?, bits)?;
                println!("{label} BER {ber}");
                ok &= ber == 0.0;
            }
            Ok(ok)
        }
        Command::Verify { generator, n } => {
            let report = match params.generator(generator) {
                Ok(kind) => {
                    let n = n.or(params.config.n).unwrap_or(8);
                    let mut r = generator_report(&kind.build(n, seed)?, seed);
                    r.extend(wavelet_report(seed));
                    r
                }
                Err(_) => full_report(seed),
            };
            println!("{report}");
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
