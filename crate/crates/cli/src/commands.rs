use num_bigint::BigInt;
use serde_json::{json, Value};
use sigma_lab::classify::{self, count_nonclass_exhaustive};
use sigma_lab::enumerate::{
    a_brute, a_series, a_seq, av_count_scan, av_pair_count, bounded_height_count, bounded_height_dp, brute_sortable,
    brute_sortable_with_progress, catalan, catalan_number, catalan_series, sort123_count, sort123_series,
    sortable_members, to_bigints, uhd_avoiding_paths, Method, SequenceReport,
};
use sigma_lab::paths::{
    av213_from_dyck, dyck_from_av213, phi, psi, render_ascii, render_svg, schroder_from_sortable123,
    sortable123_from_schroder, steps_json,
};
use sigma_lab::series::expand_rational;
use sigma_lab::tables::{decreasing_table, nonclass_table, pattern_table, two_basis_table};
use sigma_lab::verify::verify_with_progress;
use sigma_lab::{first_pass, is_sortable, perm, run_machine, Budget, DyckPath, Permutation, SchroderPath, Step};

use crate::{BijectionMode, Failure, Format, Limits, Render, TableName};

type Outcome = Result<(), Failure>;

fn only_text_or_json(f: Format) -> Outcome {
    match f {
        Format::Text | Format::Json => Ok(()),
        _ => Err(Failure::Usage("this command supports --format text or json only".into())),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn parse<T: std::str::FromStr<Err = sigma_lab::Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(Failure::Library)
}

pub fn sort(f: Format, sigma: &Permutation, pi: &Permutation, with_trace: bool) -> Outcome {
    only_text_or_json(f)?;
    let (out, trace) = run_machine(pi, sigma)?;
    let sortable = out.is_identity();
    match f {
        Format::Json => {
            let mut v = json!({ "sigma": sigma, "input": pi, "output": out, "sortable": sortable });
            if with_trace {
                v["trace"] = serde_json::to_value(&trace).unwrap();
            }
            print_json(&v);
        }
        _ => {
            println!("{}", if sortable { "sortable" } else { "not sortable" });
            println!("output {out}");
            if with_trace {
                print!("{}", trace.to_text());
            }
        }
    }
    Ok(())
}

pub fn trace(f: Format, sigma: &Permutation, pi: &Permutation) -> Outcome {
    only_text_or_json(f)?;
    let (_, trace) = run_machine(pi, sigma)?;
    match f {
        Format::Json => print_json(&serde_json::to_value(&trace).unwrap()),
        _ => print!("{}", trace.to_text()),
    }
    Ok(())
}

pub fn firstpass(f: Format, sigma: &Permutation, pi: &Permutation) -> Outcome {
    only_text_or_json(f)?;
    let out = first_pass(pi, sigma)?;
    let avoids = out.avoids(&perm("231"));
    match f {
        Format::Json => print_json(&json!({ "sigma": sigma, "input": pi, "output": out, "avoids_231": avoids })),
        _ => println!("{out}"),
    }
    Ok(())
}

pub fn classify(f: Format, sigma: &Permutation) -> Outcome {
    only_text_or_json(f)?;
    let status = classify::classify(sigma)?;
    match f {
        Format::Json => {
            let mut v = serde_json::to_value(&status).unwrap();
            v["sigma"] = json!(sigma);
            print_json(&v);
        }
        _ => match (&status.basis, &status.witness) {
            (Some(basis), _) => {
                let b: Vec<String> = basis.iter().map(|p| p.to_string()).collect();
                println!("IsClass basis {{{}}}", b.join(", "));
            }
            (_, Some(w)) => println!("NotClass: {} is sortable but contains {}, which is not", w.alpha, w.pattern),
            _ => unreachable!("a verdict carries a basis or a witness"),
        },
    }
    Ok(())
}

pub fn witness(f: Format, sigma: &Permutation) -> Outcome {
    only_text_or_json(f)?;
    let status = classify::classify(sigma)?;
    let Some(w) = status.witness else {
        return Err(Failure::Library(sigma_lab::Error::Precondition(format!(
            "the {sigma}-sortable permutations form a class"
        ))));
    };
    let alpha_ok = is_sortable(&w.alpha, sigma)?;
    let pattern_ok = is_sortable(&w.pattern, sigma)?;
    let contained = w.alpha.contains(&w.pattern).map(|o| o.positions);
    match f {
        Format::Json => print_json(&json!({
            "sigma": sigma,
            "alpha": w.alpha,
            "pattern": w.pattern,
            "alpha_sortable": alpha_ok,
            "pattern_sortable": pattern_ok,
            "occurrence": contained,
        })),
        _ => {
            println!("{} is {}{sigma}-sortable", w.alpha, if alpha_ok { "" } else { "not " });
            println!("{} is {}{sigma}-sortable", w.pattern, if pattern_ok { "" } else { "not " });
            if let Some(pos) = &contained {
                let p: Vec<String> = pos.iter().map(|i| i.to_string()).collect();
                println!("occurrence at positions {}", p.join(","));
            }
        }
    }
    Ok(())
}

fn emit_report(f: Format, report: &SequenceReport) -> Outcome {
    match f {
        Format::Text => print!("{}", report.to_table()),
        Format::Json => print_json(&serde_json::to_value(report).unwrap()),
        Format::Csv => print!("{}", report.to_csv()),
        Format::Bfile => print!("{}", report.to_bfile()),
    }
    if report.all_checks_pass() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn progress_meter(n: usize) -> impl Fn(u64, u64) + Sync {
    move |done, total| {
        if n >= 10 {
            eprint!("\rn={n}: {:>3}%", done * 100 / total);
            if done == total {
                eprintln!();
            }
        }
    }
}

pub fn enumerate(f: Format, sigma: &Permutation, limits: Limits, list: bool) -> Outcome {
    let budget = limits.budget();
    let max_n = limits.max_n(8);
    budget.check(max_n)?;
    if list {
        let members = sortable_members_within(sigma, max_n, budget)?;
        match f {
            Format::Json => print_json(&json!(members)),
            Format::Text | Format::Csv => members.iter().for_each(|p| println!("{p}")),
            Format::Bfile => return Err(Failure::Usage("--list cannot be written as a b-file".into())),
        }
        return Ok(());
    }
    let mut values = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        values.push(brute_sortable_with_progress(sigma, n, budget, &progress_meter(n))?);
    }
    emit_report(f, &SequenceReport::from_u64(format!("Sort_n({sigma})"), 0, &values, Method::Brute))
}

fn sortable_members_within(sigma: &Permutation, n: usize, budget: Budget) -> Result<Vec<Permutation>, Failure> {
    budget.check(n)?;
    if n <= Budget::DEFAULT.max_n {
        return Ok(sortable_members(sigma, n)?);
    }
    let mut m = sigma_lab::SigmaMachine::new(sigma)?;
    Ok(sigma_lab::perm::all_permutations(n).filter(|p| m.sorts(p.values())).collect())
}

fn report_from(name: &str, offset: usize, values: Vec<BigInt>, method: Method) -> SequenceReport {
    SequenceReport::new(name, offset, values, method)
}

fn brute_report(name: &str, offset: usize, upto: usize, count: impl Fn(usize) -> sigma_lab::Result<u64>) -> Result<SequenceReport, Failure> {
    let values = (offset..=upto).map(&count).collect::<sigma_lab::Result<Vec<_>>>()?;
    Ok(SequenceReport::from_u64(name, offset, &values, Method::Brute))
}

pub fn sequence(f: Format, name: &str, limits: Limits) -> Outcome {
    let budget = limits.budget();
    let max_n = limits.max_n(10);
    let brute_top = max_n.min(budget.max_n);
    let report = match name.split_once(':').map_or((name, None), |(a, b)| (a, Some(b))) {
        ("catalan", None) => {
            let mut r = report_from("C_n", 0, to_bigints(&catalan(max_n)), Method::Formula);
            let gf = catalan_series(max_n)?;
            r.cross_check("C(x)", &report_from("C(x)", 0, gf.into_coeffs(), Method::Gf));
            r.cross_check("Sort_n(12)", &brute_report("Sort_n(12)", 0, brute_top, |n| brute_sortable(&perm("12"), n, budget))?);
            r
        }
        ("a", None) => {
            let mut r = report_from("a_n", 0, a_seq(max_n), Method::Formula);
            r.cross_check("A(x)", &report_from("A(x)", 0, a_series(max_n)?.into_coeffs(), Method::Gf));
            r.cross_check("Av_n(231) with 321 prefix", &brute_report("a_n", 0, brute_top, |n| a_brute(n, budget))?);
            r
        }
        ("sort123", None) => {
            let mut r = report_from("Sort_n(123)", 0, to_bigints(&sort123_count(max_n)), Method::Formula);
            r.cross_check("GF", &report_from("GF", 0, sort123_series(max_n)?.into_coeffs(), Method::Gf));
            r.cross_check("brute", &brute_report("brute", 0, brute_top, |n| brute_sortable(&perm("123"), n, budget))?);
            let paths: Vec<u64> = (1..=max_n.min(10)).map(|n| uhd_avoiding_paths(n - 1)).collect();
            r.cross_check("UHD-avoiding Schröder paths", &SequenceReport::from_u64("paths", 1, &paths, Method::Brute));
            r
        }
        ("nonclass", None) => {
            let values: Vec<BigInt> = (3..=max_n.max(3)).map(|n| BigInt::from(catalan_number(n))).collect();
            let mut r = report_from("non-class σ of length n", 3, values, Method::Formula);
            let scan: Vec<u64> = (3..=brute_top.min(max_n)).map(count_nonclass_exhaustive).collect();
            r.cross_check("σ̂ scan", &SequenceReport::from_u64("scan", 3, &scan, Method::Brute));
            r
        }
        ("height", Some(k)) => {
            let k: usize = k.parse().map_err(|_| Failure::Usage(format!("height bound {k:?} is not a number")))?;
            let gf = bounded_height_count(k, max_n)?;
            let mut r = report_from(&format!("Dyck paths of height ≤ {k}"), 0, gf.into_coeffs(), Method::Gf);
            r.cross_check("walk count", &report_from("dp", 0, to_bigints(&bounded_height_dp(k, max_n)), Method::Formula));
            let rho = Permutation::decreasing(k + 1);
            if k >= 1 {
                r.cross_check(
                    format!("Sort_n({rho})"),
                    &brute_report("brute", 0, brute_top, |n| brute_sortable(&rho, n, budget))?,
                );
            }
            r
        }
        ("av", Some(pq)) => {
            let (p, q) = pq
                .split_once(',')
                .ok_or_else(|| Failure::Usage("expected av:P,Q with two patterns".into()))?;
            let (p, q): (Permutation, Permutation) = (parse(p)?, parse(q)?);
            budget.check(max_n)?;
            let mut r = brute_report(&format!("Av_n({p}, {q})"), 0, max_n, |n| av_pair_count(&p, &q, n, budget))?;
            let pats = [p.clone(), q.clone()];
            r.cross_check("full scan", &brute_report("scan", 0, max_n.min(9), |n| av_count_scan(&pats, n, budget))?);
            r
        }
        _ => {
            return Err(Failure::Usage(format!(
                "unknown sequence {name:?}; expected catalan, a, sort123, nonclass, height:K or av:P,Q"
            )))
        }
    };
    emit_report(f, &report)
}

struct TableLine {
    label: String,
    offset: usize,
    printed: Vec<u64>,
    computed: Vec<String>,
}

impl TableLine {
    fn matches(&self) -> bool {
        self.printed.iter().zip(&self.computed).all(|(p, c)| p.to_string() == *c)
    }
}

pub fn table(f: Format, name: TableName, limits: Limits) -> Outcome {
    let budget = limits.budget();
    let max_n = limits.max_n(Budget::DEFAULT.max_n);
    budget.check(max_n)?;
    if name == TableName::Sec3 {
        return nonclass_rows(f);
    }
    let mut lines = Vec::new();
    let truncate = |offset: usize, values: &[u64]| -> Vec<u64> {
        values.iter().enumerate().take_while(|(i, _)| i + offset <= max_n).map(|(_, &v)| v).collect()
    };
    match name {
        TableName::Sec4 => {
            let t = decreasing_table();
            for row in &t.rows {
                let rho = Permutation::decreasing(row.k);
                let printed = truncate(t.offset, &row.values);
                let computed = (0..printed.len())
                    .map(|i| brute_sortable(&rho, i + t.offset, budget).map(|c| c.to_string()))
                    .collect::<sigma_lab::Result<_>>()?;
                lines.push(TableLine { label: format!("k={}", row.k), offset: t.offset, printed, computed });
            }
        }
        TableName::Sec6 => {
            let t = pattern_table();
            for row in &t.rows {
                let printed = truncate(t.offset, &row.values);
                let computed = (0..printed.len())
                    .map(|i| brute_sortable(&row.sigma, i + t.offset, budget).map(|c| c.to_string()))
                    .collect::<sigma_lab::Result<_>>()?;
                lines.push(TableLine { label: row.sigma.to_string(), offset: t.offset, printed, computed });
            }
        }
        TableName::Fig3 => {
            for row in two_basis_table().rows {
                let printed = truncate(row.offset, &row.sequence);
                let order = row.offset + row.sequence.len() - 1;
                let gf = expand_rational(&row.numerator_poly(), &row.denominator_poly(), order)?;
                let via_gf: Vec<String> = (0..printed.len()).map(|i| gf.coeff(i + row.offset).to_string()).collect();
                lines.push(TableLine {
                    label: format!("{} GF ({})/({})", row.patterns[0], row.numerator_poly(), row.denominator_poly()),
                    offset: row.offset,
                    printed: printed.clone(),
                    computed: via_gf,
                });
                for sigma in &row.patterns {
                    let reversed = sigma.reverse();
                    let computed = (0..printed.len())
                        .map(|i| av_pair_count(&perm("132"), &reversed, i + row.offset, budget).map(|c| c.to_string()))
                        .collect::<sigma_lab::Result<_>>()?;
                    lines.push(TableLine {
                        label: format!("{sigma} Av(132, {reversed})"),
                        offset: row.offset,
                        printed: printed.clone(),
                        computed,
                    });
                }
            }
        }
        TableName::Sec3 => unreachable!(),
    }
    let all_match = lines.iter().all(TableLine::matches);
    match f {
        Format::Json => print_json(&json!(lines
            .iter()
            .map(|l| json!({
                "row": l.label,
                "offset": l.offset,
                "printed": l.printed,
                "computed": l.computed.iter().map(|c| c.parse::<u64>().map_or(json!(c), |v| json!(v))).collect::<Vec<_>>(),
                "match": l.matches(),
            }))
            .collect::<Vec<_>>())),
        Format::Csv => {
            println!("row,n,printed,computed");
            for l in &lines {
                for (i, (p, c)) in l.printed.iter().zip(&l.computed).enumerate() {
                    println!("\"{}\",{},{p},{c}", l.label, i + l.offset);
                }
            }
        }
        Format::Text => {
            for l in &lines {
                let p: Vec<String> = l.printed.iter().map(|v| v.to_string()).collect();
                println!("{} {} (n from {})", if l.matches() { "ok      " } else { "MISMATCH" }, l.label, l.offset);
                println!("         printed  {}", p.join(","));
                if !l.matches() {
                    println!("         computed {}", l.computed.join(","));
                }
            }
        }
        Format::Bfile => return Err(Failure::Usage("tables cannot be written as b-files".into())),
    }
    if all_match {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn nonclass_rows(f: Format) -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for r in nonclass_table().rows {
        let sortable = is_sortable(&r.sortable, &r.sigma)?;
        let pattern_sortable = is_sortable(&r.pattern, &r.sigma)?;
        let contains = r.sortable.contains(&r.pattern).is_some();
        let good = sortable && !pattern_sortable && contains;
        ok &= good;
        rows.push((r, sortable, pattern_sortable, contains, good));
    }
    match f {
        Format::Json => print_json(&json!(rows
            .iter()
            .map(|(r, s, ps, c, g)| json!({
                "sigma": r.sigma, "sortable": r.sortable, "pattern": r.pattern,
                "sortable_is_sortable": s, "pattern_is_sortable": ps, "contains": c, "match": g,
            }))
            .collect::<Vec<_>>())),
        Format::Csv => {
            println!("sigma,sortable,pattern,match");
            for (r, .., g) in &rows {
                println!("{},{},{},{g}", r.sigma, r.sortable, r.pattern);
            }
        }
        Format::Text => {
            println!("σ     sortable  pattern");
            for (r, .., g) in &rows {
                println!("{:<5} {:<9} {:<8} {}", r.sigma.to_string(), r.sortable.to_string(), r.pattern.to_string(), if *g { "ok" } else { "MISMATCH" });
            }
        }
        Format::Bfile => return Err(Failure::Usage("tables cannot be written as b-files".into())),
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

enum Item {
    Perm(Permutation),
    Path(Vec<Step>, String),
}

impl Item {
    fn json(&self) -> Value {
        match self {
            Item::Perm(p) => json!(p),
            Item::Path(_, s) => json!(s),
        }
    }

    fn text(&self) -> String {
        match self {
            Item::Perm(p) => p.to_string(),
            Item::Path(_, s) => s.clone(),
        }
    }
}

fn dyck_item(d: &DyckPath) -> Item {
    Item::Path(d.steps().to_vec(), d.to_string())
}

fn schroder_item(p: &SchroderPath) -> Item {
    Item::Path(p.steps().to_vec(), p.to_string())
}

pub fn bijection(f: Format, mode: BijectionMode, input: &str, inverse: bool, render: Option<Render>) -> Outcome {
    only_text_or_json(f)?;
    let (from, to) = match (mode, inverse) {
        (BijectionMode::Dyck, false) => {
            let d: DyckPath = parse(input)?;
            let p = av213_from_dyck(&d);
            (dyck_item(&d), Item::Perm(p))
        }
        (BijectionMode::Dyck, true) => {
            let p: Permutation = parse(input)?;
            let d = dyck_from_av213(&p)?;
            (Item::Perm(p), dyck_item(&d))
        }
        (BijectionMode::Schroder, false) => {
            let p: Permutation = parse(input)?;
            let s = schroder_from_sortable123(&p)?;
            (Item::Perm(p), schroder_item(&s))
        }
        (BijectionMode::Schroder, true) => {
            let s: SchroderPath = parse(input)?;
            let p = sortable123_from_schroder(&s)?;
            (schroder_item(&s), Item::Perm(p))
        }
        (BijectionMode::Phi, false) | (BijectionMode::Psi, true) => {
            let p: Permutation = parse(input)?;
            let q = phi(&p)?;
            (Item::Perm(p), Item::Perm(q))
        }
        (BijectionMode::Phi, true) | (BijectionMode::Psi, false) => {
            let p: Permutation = parse(input)?;
            let q = psi(&p)?;
            (Item::Perm(p), Item::Perm(q))
        }
    };
    let path = [&from, &to].into_iter().find_map(|i| match i {
        Item::Path(steps, _) => Some(steps.clone()),
        Item::Perm(_) => None,
    });
    match f {
        Format::Json => {
            let mut v = json!({ "input": from.json(), "output": to.json() });
            if let Some(steps) = &path {
                v["steps"] = steps_json(steps);
            }
            if let (Some(r), Some(steps)) = (render, &path) {
                v["render"] = json!(draw(steps, r));
            }
            print_json(&v);
        }
        _ => {
            println!("{} -> {}", from.text(), to.text());
            if let (Some(r), Some(steps)) = (render, &path) {
                print!("{}", draw(steps, r));
            }
        }
    }
    Ok(())
}

fn draw(steps: &[Step], r: Render) -> String {
    match r {
        Render::Ascii => render_ascii(steps),
        Render::Svg => render_svg(steps),
    }
}

pub fn render(path: &str, r: Render) -> Outcome {
    let p: SchroderPath = parse(path)?;
    print!("{}", draw(p.steps(), r));
    Ok(())
}

pub fn verify(f: Format, limits: Limits) -> Outcome {
    only_text_or_json(f)?;
    let max_n = limits.max_n(Budget::DEFAULT.max_n);
    limits.budget().check(max_n)?;
    let text = f == Format::Text;
    let report = verify_with_progress(max_n, &mut |c| {
        if text {
            eprintln!("{} {}", if c.passed { "pass" } else { "FAIL" }, c.name);
        }
    })?;
    match f {
        Format::Json => print_json(&json!({ "passed": report.passed(), "report": report })),
        _ => print!("{}", report.to_text()),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}
