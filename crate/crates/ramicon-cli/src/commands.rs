// SPDX-License-Identifier: MIT OR Apache-2.0
//! The subcommands. Each returns the text for standard output and writes any
//! requested files itself.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ramicon_core::algebra::{parse_rational, CycField, CycNum, Field, FieldExt};
use ramicon_core::connection::{gauge_transform, normal_matrix, Connection};
use ramicon_core::exponent::{unfold_exponent, unfolded_residue_spectrum, validate_exponent, RamifiedExponent};
use ramicon_core::isomonodromy::{adapt, commutator_bracket_check, lift_ramified, AdaptedConnection};
use ramicon_core::normalform::normalize;
use ramicon_core::pairing::{
    a_spaces, d0, delta_map, moduli_dimension, perfect_pairing_check, sym2_basis, xi_pairing, PointKind, Side,
    Sym2Element,
};
use ramicon_core::ramstruct::{
    build_factorized, equivalence_report, from_generic, to_generic, verify_factorized, FactorizedStructure,
};
use ramicon_core::sample::{random_direction, random_exponent, scrambled_connection, small_rational};
use ramicon_core::shearing::{descend, shear, shear_normalized, sheared_lift};

use crate::document::{
    parse, parse_any, render, ConnectionDoc, DirectionDoc, ExponentDoc, GaugeDoc, Kind, LiftDoc, NumDoc,
};
use crate::failure::CliError;

/// Default cap on the number of series orders a command may request.
pub const DEFAULT_MAX_PREC: i64 = 64;

/// The precision cap from `RAMICON_MAX_PREC`, or the default.
pub fn max_prec() -> Result<i64, CliError> {
    match std::env::var("RAMICON_MAX_PREC") {
        Err(_) => Ok(DEFAULT_MAX_PREC),
        Ok(text) => match text.trim().parse::<i64>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(CliError::Usage(format!("RAMICON_MAX_PREC must be a positive integer, got {text:?}"))),
        },
    }
}

fn check_prec(requested: i64) -> Result<(), CliError> {
    let cap = max_prec()?;
    if requested > cap {
        return Err(CliError::PrecisionCap { requested, cap });
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `text` to `out` when given and returns what should go to standard output.
fn emit(text: String, out: Option<&Path>, summary: String) -> Result<String, CliError> {
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(summary)
        }
        None => Ok(text),
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Loaded input documents sharing one coefficient field.
struct Inputs {
    field: Field,
    nu: ExponentDoc,
    conn: Option<ConnectionDoc>,
    dir: Option<DirectionDoc>,
}

impl Inputs {
    fn load(nu: &Path, conn: Option<&Path>, dir: Option<&Path>, extra_root: Option<usize>) -> Result<Inputs, CliError> {
        let nu: ExponentDoc = parse(&read(nu)?, Kind::Exponent)?;
        let conn: Option<ConnectionDoc> = conn.map(|p| parse(&read(p)?, Kind::Connection)).transpose()?;
        let dir: Option<DirectionDoc> = dir.map(|p| parse(&read(p)?, Kind::Direction)).transpose()?;
        let mut order = nu.field_order.max(1);
        if let Some(c) = &conn {
            order = lcm(order, c.field_order.max(1));
        }
        if let Some(d) = &dir {
            order = lcm(order, d.field_order.max(1));
        }
        if let Some(r) = extra_root {
            order = lcm(order, r as u32);
        }
        let field = crate::document::field_of_order(order)?;
        Ok(Inputs { field, nu, conn, dir })
    }

    fn exponent(&self) -> Result<RamifiedExponent, CliError> {
        self.nu.decode_in(&self.field)
    }

    fn connection(&self, nu: &RamifiedExponent, default_prec: i64) -> Result<Connection, CliError> {
        match &self.conn {
            Some(doc) => {
                let c = doc.decode_in(&self.field)?;
                check_prec(c.prec())?;
                Ok(c)
            }
            None => {
                check_prec(default_prec)?;
                Ok(normal_matrix(nu, default_prec)?)
            }
        }
    }
}

/// `validate FILE`: parses a document and checks the invariants of its kind.
pub fn validate(path: &Path) -> Result<String, CliError> {
    let text = read(path)?;
    let (kind, _) = parse_any(&text)?;
    match kind {
        Kind::Exponent => {
            let doc: ExponentDoc = parse(&text, kind)?;
            validate_exponent(&doc.decode()?)?;
        }
        Kind::Direction => {
            let doc: DirectionDoc = parse(&text, kind)?;
            let field = crate::document::field_of_order(doc.field_order)?;
            doc.decode_in(&field)?;
        }
        Kind::Connection => {
            let doc: ConnectionDoc = parse(&text, kind)?;
            let field = crate::document::field_of_order(doc.field_order)?;
            check_prec(doc.decode_in(&field)?.prec())?;
        }
        Kind::Lift => {
            let doc: LiftDoc = parse(&text, kind)?;
            doc.decode()?.to_form()?;
        }
        Kind::Report => {}
    }
    Ok(format!("VALID {}\n", kind_name(kind)))
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Exponent => "exponent",
        Kind::Direction => "direction",
        Kind::Connection => "connection",
        Kind::Lift => "lift",
        Kind::Report => "report",
    }
}

/// `normalize`: reduces a connection to the normal form of `ν` modulo `z^order`.
pub fn normalize_cmd(nu: &Path, conn: &Path, order: i64, out_dir: Option<&Path>) -> Result<String, CliError> {
    let inputs = Inputs::load(nu, Some(conn), None, None)?;
    let nu = inputs.exponent()?;
    if order < nu.m() as i64 {
        return Err(CliError::Usage(format!("--order {order} is below the pole order {}", nu.m())));
    }
    check_prec(order)?;
    let c = inputs.connection(&nu, order)?;
    let outcome = normalize(&c, &nu, order)?;
    let conn_text = render(Kind::Connection, &ConnectionDoc::encode(&outcome.connection))?;
    let gauge_text = render(Kind::Report, &GaugeReport { report: "gauge", gauge: GaugeDoc::encode(&outcome.gauge) })?;
    let summary = format!("NORMALIZED order={order} steps={}\n", outcome.trace.len());
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            write(&dir.join("connection.json"), &conn_text)?;
            write(&dir.join("gauge.json"), &gauge_text)?;
            Ok(summary)
        }
        None => Ok(conn_text),
    }
}

#[derive(Serialize)]
struct GaugeReport {
    report: &'static str,
    gauge: GaugeDoc,
}

#[derive(Serialize)]
struct ShearReport {
    report: &'static str,
    galois_order: usize,
    pole_order: usize,
    diagonal: bool,
    leading_distinct: bool,
    connection: ConnectionDoc,
}

/// `shear`: the sheared unramified connection on the cover.
pub fn shear_cmd(nu: &Path, conn: Option<&Path>, prec: Option<i64>, out: Option<&Path>) -> Result<String, CliError> {
    let exp: ExponentDoc = parse(&read(nu)?, Kind::Exponent)?;
    let inputs = Inputs::load(nu, conn, None, Some(exp.r))?;
    let nu = inputs.exponent()?;
    let default = prec.unwrap_or(2 * nu.m() as i64 + 1);
    let c = inputs.connection(&nu, default)?;
    let sheared = if inputs.conn.is_some() { shear(&c, &nu)? } else { shear_normalized(&c, &nu)? };
    let a = sheared.connection.matrix();
    let r = nu.r();
    let diagonal = a.mask(|i, j| i != j).is_zero();
    let leading = a.coeff(0).map(|m| (0..r).map(|i| m.get(i, i).clone()).collect::<Vec<CycNum>>());
    let leading_distinct = leading.is_some_and(|v| (0..r).all(|i| (i + 1..r).all(|j| v[i] != v[j])));
    let report = ShearReport {
        report: "shear",
        galois_order: sheared.galois_order,
        pole_order: sheared.connection.pole_order(),
        diagonal,
        leading_distinct,
        connection: ConnectionDoc::encode(&sheared.connection),
    };
    let summary = format!("SHEARED pole_order={} diagonal={diagonal}\n", report.pole_order);
    emit(render(Kind::Report, &report)?, out, summary)
}

/// `lift`: the one-parameter horizontal lift along a direction.
pub fn lift_cmd(
    nu: &Path,
    dir: &Path,
    conn: Option<&Path>,
    prec: Option<i64>,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let inputs = Inputs::load(nu, conn, Some(dir), None)?;
    let nu = inputs.exponent()?;
    let direction = inputs.dir.as_ref().expect("loaded").decode_in(&inputs.field)?;
    let m = nu.m() as i64;
    let depth = 2 * m - 1;
    let c = inputs.connection(&nu, prec.unwrap_or(3 * m))?;
    let adapted = if inputs.conn.is_some() { adapt(&c, &nu, depth)?.1 } else { AdaptedConnection::new(&c, &nu, depth)? };
    let lift = lift_ramified(&adapted, &direction)?;
    let summary = format!("LIFTED window={}\n", lift.certified_window.unwrap_or(0));
    emit(render(Kind::Lift, &LiftDoc::encode(&lift))?, out, summary)
}

/// `curvature FILE`: prints `FLAT` iff every curvature component of the lift vanishes.
pub fn curvature_cmd(path: &Path) -> Result<String, CliError> {
    let doc: LiftDoc = parse(&read(path)?, Kind::Lift)?;
    let lift = doc.decode()?;
    if lift.is_flat()? {
        Ok("FLAT\n".to_string())
    } else {
        Err(CliError::CheckFailed("CURVED".to_string()))
    }
}

#[derive(Serialize)]
struct PairingReportDoc {
    report: &'static str,
    r: usize,
    m: usize,
    kernel_dim: usize,
    cokernel_dim: usize,
    rank: usize,
    vanishes_on_image: bool,
    antisymmetric_radical_dim: usize,
    perfect: bool,
    perfect_modulo_antisymmetric_tops: bool,
}

/// `pair`: the kernel/cokernel pairing check at the standard factorized structure.
pub fn pair_cmd(r: usize, m: usize, nu: Option<&Path>, check_perfect: bool) -> Result<String, CliError> {
    if r < 2 || m < 2 {
        return Err(CliError::Usage("pair needs --r ≥ 2 and --m ≥ 2".into()));
    }
    let field = CycField::new(1);
    let exponent = match nu {
        Some(p) => {
            let doc: ExponentDoc = parse(&read(p)?, Kind::Exponent)?;
            let e = doc.decode_in(&crate::document::field_of_order(doc.field_order)?)?;
            if e.r() != r || e.m() != m {
                return Err(CliError::Usage(format!("exponent has r={} m={}, expected r={r} m={m}", e.r(), e.m())));
            }
            e
        }
        None => RamifiedExponent::simple(&field, r, m)?,
    };
    let fs = FactorizedStructure::standard(exponent.field(), r, m)?;
    let rep = perfect_pairing_check(&exponent, &fs)?;
    if check_perfect {
        let line = |tag: &str| {
            format!(
                "{tag} rank={} dims=({},{}) antisymmetric_radical={}",
                rep.rank, rep.kernel_dim, rep.cokernel_dim, rep.antisymmetric_radical_dim
            )
        };
        return if rep.is_perfect() {
            Ok(format!("PERFECT rank={} dims=({},{})\n", rep.rank, rep.kernel_dim, rep.cokernel_dim))
        } else {
            Err(CliError::CheckFailed(line("NOT PERFECT")))
        };
    }
    let doc = PairingReportDoc {
        report: "pairing",
        r,
        m,
        kernel_dim: rep.kernel_dim,
        cokernel_dim: rep.cokernel_dim,
        rank: rep.rank,
        vanishes_on_image: rep.vanishes_on_image,
        antisymmetric_radical_dim: rep.antisymmetric_radical_dim,
        perfect: rep.is_perfect(),
        perfect_modulo_antisymmetric_tops: rep.is_perfect_modulo_antisymmetric_tops(),
    };
    render(Kind::Report, &doc)
}

/// `dims`: the moduli dimension for a genus and a list of marked points.
pub fn dims_cmd(genus: i64, r: usize, ram: &[usize], un: &[usize], log: usize) -> Result<String, CliError> {
    let mut points: Vec<(PointKind, usize)> = Vec::new();
    points.extend(std::iter::repeat_n((PointKind::Log, 1), log));
    points.extend(un.iter().map(|&m| (PointKind::Unramified, m)));
    points.extend(ram.iter().map(|&m| (PointKind::Ramified, m)));
    Ok(format!("{}\n", moduli_dimension(genus, r, &points)?))
}

#[derive(Serialize)]
struct SpectrumDoc {
    index: usize,
    charpoly: Vec<NumDoc>,
    separable: bool,
}

#[derive(Serialize)]
struct UnfoldReport {
    report: &'static str,
    r: usize,
    m: usize,
    h: NumDoc,
    ratios: Vec<NumDoc>,
    roots: Vec<NumDoc>,
    spectra: Vec<SpectrumDoc>,
    separable_off_ramified_root: bool,
    specializes_to_base: bool,
}

/// `unfold`: the unfolded exponent at parameter `h` and its residue spectra.
pub fn unfold_cmd(nu: &Path, h: &str, ratios: &[String], out: Option<&Path>) -> Result<String, CliError> {
    let inputs = Inputs::load(nu, None, None, None)?;
    let exponent = inputs.exponent()?;
    let field = inputs.field.clone();
    let h = field.rational(parse_rational(h)?);
    let q: Vec<CycNum> =
        ratios.iter().map(|s| Ok(field.rational(parse_rational(s)?))).collect::<Result<_, CliError>>()?;
    let unfolded = unfold_exponent(&exponent, h.clone(), q.clone())?;
    let specializes = unfolded.with_h(field.zero()).specialize_at_zero()? == exponent;
    let mut spectra = Vec::new();
    for j in 1..=exponent.m() {
        let (poly, separable) = unfolded_residue_spectrum(&unfolded, j)?;
        spectra.push(SpectrumDoc { index: j, charpoly: poly.iter().map(NumDoc::encode).collect(), separable });
    }
    // The last root has ratio 1 and stays a ramified pole, so only the others are expected to split.
    let all_separable = spectra.iter().filter(|s| s.index < exponent.m()).all(|s| s.separable);
    let report = UnfoldReport {
        report: "unfold",
        r: exponent.r(),
        m: exponent.m(),
        h: NumDoc::encode(&h),
        ratios: q.iter().map(NumDoc::encode).collect(),
        roots: unfolded.roots().iter().map(NumDoc::encode).collect(),
        spectra,
        separable_off_ramified_root: all_separable,
        specializes_to_base: specializes,
    };
    let summary = format!("UNFOLDED separable={all_separable} specializes={specializes}\n");
    emit(render(Kind::Report, &report)?, out, summary)
}

/// `ramstruct-verify`: builds the factorized structure of a connection and checks its axioms.
pub fn ramstruct_verify_cmd(nu: &Path, conn: Option<&Path>, prec: Option<i64>) -> Result<String, CliError> {
    let inputs = Inputs::load(nu, conn, None, None)?;
    let nu = inputs.exponent()?;
    let depth = 2 * nu.m() as i64 - 1;
    let mut c = inputs.connection(&nu, prec.unwrap_or(depth + 1))?;
    if inputs.conn.is_some() {
        c = normalize(&c, &nu, depth)?.transformed;
    }
    let fs = build_factorized(&c, &nu)?;
    let report = verify_factorized(&fs, &c, &nu)?;
    let mut out = String::new();
    for check in &report.checks {
        out.push_str(&format!("{} {}\n", if check.passed { "PASS" } else { "FAIL" }, check.name));
    }
    if report.all_passed() {
        out.push_str("VERIFIED\n");
        Ok(out)
    } else {
        Err(CliError::CheckFailed(format!("{out}NOT VERIFIED")))
    }
}

/// `selftest`: seeded randomized checks of the main identities; one line per check.
pub fn selftest_cmd(seed: u64, rounds: usize) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    let mut all = true;
    let shapes = [(2usize, 2usize), (3, 2), (2, 3)];
    for round in 0..rounds {
        let (r, m) = shapes[rng.random_range(0..shapes.len())];
        for (name, ok) in selftest_round(&mut rng, r, m)? {
            all &= ok;
            lines.push(format!("{} round={round} r={r} m={m} {name}", if ok { "PASS" } else { "FAIL" }));
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    if all {
        text.push_str("SELFTEST PASSED\n");
        Ok(text)
    } else {
        Err(CliError::CheckFailed(format!("{text}SELFTEST FAILED")))
    }
}

fn selftest_round(rng: &mut ChaCha8Rng, r: usize, m: usize) -> Result<Vec<(&'static str, bool)>, CliError> {
    let field = CycField::new(r as u32);
    let nu = random_exponent(rng, &field, r, m)?;
    let mi = m as i64;
    let mut out = Vec::new();

    let q = mi + 2;
    let (c, _) = scrambled_connection(rng, &nu, q + 1)?;
    let outcome = normalize(&c, &nu, q)?;
    let round_trip = outcome.connection == normal_matrix(&nu, q)?
        && gauge_transform(&c, &outcome.gauge)?.truncate(q)? == outcome.connection;
    out.push(("normal form round trip", round_trip));

    let adapted = outcome.transformed.clone();
    let fs = build_factorized(&adapted, &nu)?;
    out.push(("factorized axioms", verify_factorized(&fs, &adapted, &nu)?.all_passed()));
    out.push(("generic bijection round trip", equivalence_report(&from_generic(&to_generic(&fs)?)?, &fs)?.all_passed()));

    let ac = AdaptedConnection::new(&normal_matrix(&nu, 4 * mi)?, &nu, 3 * mi - 1)?;
    let d1 = random_direction(rng, &field, r, m)?;
    let d2 = random_direction(rng, &field, r, m)?;
    out.push(("one-parameter lift is flat", lift_ramified(&ac, &d1)?.is_flat()?));
    out.push(("bracket identities", commutator_bracket_check(&ac, &d1, &d2)?.all_passed()));

    let descended = descend(&sheared_lift(&nu, &d1, r as i64 * (3 * mi + 1))?, &nu, &d1)?;
    let flat = ramicon_core::algebra::curvature(&descended)?.is_zero();
    out.push(("descended lift is flat", flat));

    let std_fs = FactorizedStructure::standard(&field, r, m)?;
    let (a0, _) = a_spaces(&field, r, m)?;
    let mut complex_ok = true;
    for a in &a0 {
        let (tau, xi) = d0(a, &std_fs)?;
        complex_ok &= delta_map(&tau, &xi, &nu, &std_fs)?.iter().all(|x| x.is_zero());
    }
    out.push(("d1 after d0 vanishes", complex_ok));

    let pick = |rng: &mut ChaCha8Rng, side: Side| -> Result<Sym2Element, CliError> {
        let basis = sym2_basis(&field, r, m, side)?;
        let items: Vec<(CycNum, &Sym2Element)> = basis.iter().map(|b| (small_rational(rng, &field, 3), b)).collect();
        Ok(Sym2Element::combination(&field, &items, r, m, side)?)
    };
    let eta = (pick(rng, Side::W)?, pick(rng, Side::V)?);
    let eta2 = (pick(rng, Side::W)?, pick(rng, Side::V)?);
    let self_pair = xi_pairing((&eta.0, &eta.1), (&eta.0, &eta.1), &nu, &std_fs)?;
    let forward = xi_pairing((&eta.0, &eta.1), (&eta2.0, &eta2.1), &nu, &std_fs)?;
    let backward = xi_pairing((&eta2.0, &eta2.1), (&eta.0, &eta.1), &nu, &std_fs)?;
    out.push(("residue pairing is alternating", self_pair.is_zero() && forward.add(&backward)?.is_zero()));
    Ok(out)
}


/// Which random document `sample` produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SampleKind {
    /// A random admissible exponent.
    Exponent,
    /// A random deformation direction.
    Direction,
    /// The normal matrix of an exponent moved by a random gauge.
    Connection,
}

/// `sample`: a seeded random document, for fixtures and experiments.
pub fn sample_cmd(
    kind: SampleKind,
    r: usize,
    m: usize,
    seed: u64,
    nu: Option<&Path>,
    prec: Option<i64>,
) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rational = CycField::new(1);
    match kind {
        SampleKind::Exponent => {
            render(Kind::Exponent, &ExponentDoc::encode(&random_exponent(&mut rng, &rational, r, m)?))
        }
        SampleKind::Direction => {
            if m < 2 {
                return Err(CliError::Usage("a direction needs --m ≥ 2".into()));
            }
            render(Kind::Direction, &DirectionDoc::encode(&random_direction(&mut rng, &rational, r, m)?))
        }
        SampleKind::Connection => {
            let path = nu.ok_or_else(|| CliError::Usage("sample connection needs --nu".into()))?;
            let inputs = Inputs::load(path, None, None, None)?;
            let exponent = inputs.exponent()?;
            let prec = prec.unwrap_or(2 * exponent.m() as i64 + 1);
            check_prec(prec)?;
            let (c, _) = scrambled_connection(&mut rng, &exponent, prec)?;
            render(Kind::Connection, &ConnectionDoc::encode(&c))
        }
    }
}
