//! The line-oriented `.crn` network format and `.par` parametrization files.
//!
//! ```text
//! species A B C            # optional; fixes species order
//! const alpha = 2          # named constant with optional default
//! free X3 X7               # preferred free species
//! R1: B + C -> A + C ; k1*b*c
//! R2: A <-> 0 ; k2*a ; k3
//! translate R1 by -C
//! ```
//!
//! The concentration of species `X28` is written `x28`; `AE` is `ae`.
//! Identifiers in rate laws that are neither concentrations nor constants
//! must start with `k` and are rate constants.

use std::collections::{BTreeMap, HashMap};

use crate::crn::{Complex, Network};
use crate::error::{Diagnostic, Error, Result, Severity, SourceSpan};
use crate::kinetics::{classify_rate, Kinetics, RateLaw};
use crate::symbolic::parse::{parse_expr_raw, ExprParseError};
use crate::symbolic::{Expr, Symbol, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    pub reaction: usize,
    pub shift: Vec<i64>,
}

/// A parsed `.crn` file.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub network: Network,
    pub kinetics: Kinetics,
    /// Preferred free species, in directive order.
    pub free: Vec<usize>,
    pub translations: Vec<Translation>,
}

impl Model {
    pub fn conc_symbol(&self, j: usize) -> &Symbol {
        &self.kinetics.conc[j]
    }

    pub fn species_by_name_or_conc(&self, name: &str) -> Option<usize> {
        self.network.species_index(name).or_else(|| self.kinetics.conc_index(&Symbol::new(name)))
    }
}

pub fn conc_name(species: &str) -> String {
    species.to_lowercase()
}

fn folded_name(species: &str) -> String {
    let mut cs = species.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.' || c == '-')
}

struct Ctx<'a> {
    src: &'a str,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn span(&self, start: usize, end: usize) -> SourceSpan {
        let before = &self.src[..start];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map(|i| i + 1).unwrap_or(0);
        let column = self.src[line_start..start].chars().count() + 1;
        SourceSpan { line, column, start, end: end.max(start) }
    }

    fn error(&mut self, start: usize, end: usize, msg: impl Into<String>) {
        let span = self.span(start, end);
        self.diags.push(Diagnostic { severity: Severity::Error, message: msg.into(), span });
    }
}

/// A slice of the source with its absolute byte offset.
#[derive(Clone, Copy, Debug)]
struct Piece<'a> {
    text: &'a str,
    at: usize,
}

impl<'a> Piece<'a> {
    fn trim(self) -> Piece<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Piece { text: self.text.trim(), at: self.at + lead }
    }

    fn split_once(self, pat: &str) -> Option<(Piece<'a>, Piece<'a>)> {
        let i = self.text.find(pat)?;
        Some((
            Piece { text: &self.text[..i], at: self.at },
            Piece { text: &self.text[i + pat.len()..], at: self.at + i + pat.len() },
        ))
    }

    fn end(self) -> usize {
        self.at + self.text.len()
    }

    fn words(self) -> Vec<Piece<'a>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, c) in self.text.char_indices() {
            let sep = c.is_whitespace() || c == ',';
            match (sep, start) {
                (true, Some(s)) => {
                    out.push(Piece { text: &self.text[s..i], at: self.at + s });
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(Piece { text: &self.text[s..], at: self.at + s });
        }
        out
    }
}

struct Term<'a> {
    coef: i64,
    name: Piece<'a>,
}

/// `0`, or `[-] coef? name ((+|-) coef? name)*`. Signs only when `signed`.
fn parse_linear<'a>(ctx: &mut Ctx, p: Piece<'a>, signed: bool) -> Option<Vec<Term<'a>>> {
    let p = p.trim();
    if p.text.is_empty() {
        ctx.error(p.at, p.at, "expected a complex");
        return None;
    }
    if p.text == "0" || p.text == "∅" {
        return Some(Vec::new());
    }
    let mut terms = Vec::new();
    let mut sign = 1;
    let mut pieces: Vec<(i64, Piece<'a>)> = Vec::new();
    let text = p.text;
    let mut seg_start = 0;
    for (i, c) in text.char_indices() {
        if c != '+' && c != '-' {
            continue;
        }
        let seg = Piece { text: &text[seg_start..i], at: p.at + seg_start }.trim();
        if seg.text.is_empty() {
            let leading_minus = c == '-' && pieces.is_empty() && text[..i].trim().is_empty();
            if !leading_minus {
                ctx.error(p.at + i, p.at + i + 1, "dangling operator in complex");
                return None;
            }
        } else {
            pieces.push((sign, seg));
        }
        if c == '-' && !signed {
            ctx.error(p.at + i, p.at + i + 1, "negative coefficient in complex");
            return None;
        }
        sign = if c == '-' { -1 } else { 1 };
        seg_start = i + 1;
    }
    let last = Piece { text: &text[seg_start..], at: p.at + seg_start }.trim();
    if last.text.is_empty() {
        ctx.error(p.end(), p.end(), "dangling operator in complex");
        return None;
    }
    pieces.push((sign, last));
    for (sign, seg) in pieces {
        let digits: usize = seg.text.chars().take_while(|c| c.is_ascii_digit()).map(|c| c.len_utf8()).sum();
        let coef: i64 = if digits == 0 {
            1
        } else {
            match seg.text[..digits].parse() {
                Ok(v) => v,
                Err(_) => {
                    ctx.error(seg.at, seg.at + digits, "coefficient out of range");
                    return None;
                }
            }
        };
        let rest = Piece { text: &seg.text[digits..], at: seg.at + digits }.trim();
        let rest = match rest.text.strip_prefix('*') {
            Some(r) => Piece { text: r, at: rest.at + 1 }.trim(),
            None => rest,
        };
        if !is_ident(rest.text) {
            ctx.error(seg.at, seg.end(), format!("malformed complex term `{}`", seg.text));
            return None;
        }
        if coef == 0 {
            ctx.error(seg.at, seg.end(), "zero coefficient in complex");
            return None;
        }
        terms.push(Term { coef: sign * coef, name: rest });
    }
    Some(terms)
}

enum Line<'a> {
    Reaction { label: Piece<'a>, lhs: Vec<Term<'a>>, rhs: Vec<Term<'a>>, rates: Vec<Piece<'a>>, reversible: bool, whole: Piece<'a> },
    Translate { label: Piece<'a>, terms: Vec<Term<'a>>, whole: Piece<'a> },
    Free(Vec<Piece<'a>>),
    Const { name: Piece<'a>, value: Option<Piece<'a>> },
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn keyword<'a>(p: Piece<'a>, kw: &str) -> Option<Piece<'a>> {
    let rest = p.text.strip_prefix(kw)?;
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(Piece { text: rest, at: p.at + kw.len() }.trim())
    } else {
        None
    }
}

pub fn parse_network(src: &str) -> Result<Model> {
    let mut ctx = Ctx { src, diags: Vec::new() };
    let mut header: Option<Vec<String>> = None;
    let mut mentioned: Vec<String> = Vec::new();
    let mut lines: Vec<Line> = Vec::new();

    let mut offset = 0;
    for raw in src.split('\n') {
        let at = offset;
        offset += raw.len() + 1;
        let body = strip_comment(raw.strip_suffix('\r').unwrap_or(raw));
        let p = Piece { text: body, at }.trim();
        if p.text.is_empty() {
            continue;
        }
        if let Some(rest) = keyword(p, "species") {
            let names: Vec<Piece> = rest.words();
            let mut list = header.take().unwrap_or_default();
            for n in names {
                if !is_ident(n.text) {
                    ctx.error(n.at, n.end(), format!("invalid species name `{}`", n.text));
                } else if list.iter().any(|x| x == n.text) {
                    ctx.error(n.at, n.end(), format!("duplicate species `{}`", n.text));
                } else {
                    list.push(n.text.to_string());
                }
            }
            header = Some(list);
            continue;
        }
        if let Some(rest) = keyword(p, "const") {
            match rest.split_once("=") {
                Some((name, value)) => lines.push(Line::Const { name: name.trim(), value: Some(value.trim()) }),
                None => {
                    for w in rest.words() {
                        lines.push(Line::Const { name: w, value: None });
                    }
                }
            }
            continue;
        }
        if let Some(rest) = keyword(p, "free") {
            lines.push(Line::Free(rest.words()));
            continue;
        }
        if let Some(rest) = keyword(p, "translate") {
            let Some((label, by)) = rest.split_once(" by ") else {
                ctx.error(p.at, p.end(), "expected `translate <label> by <complex>`");
                continue;
            };
            let Some(terms) = parse_linear(&mut ctx, by, true) else { continue };
            lines.push(Line::Translate { label: label.trim(), terms, whole: p });
            continue;
        }
        let Some((label, rest)) = p.split_once(":") else {
            ctx.error(p.at, p.end(), "expected `LABEL: complex -> complex ; rate`");
            continue;
        };
        let label = label.trim();
        if !is_label(label.text) {
            ctx.error(label.at, label.end(), format!("invalid reaction label `{}`", label.text));
            continue;
        }
        let Some((arrow, rates)) = rest.split_once(";") else {
            ctx.error(rest.at, rest.end(), "missing `;` before rate expression");
            continue;
        };
        let (reversible, sides) = match arrow.split_once("<->") {
            Some(s) => (true, s),
            None => match arrow.split_once("->") {
                Some(s) => (false, s),
                None => {
                    ctx.error(arrow.at, arrow.end(), "missing `->`");
                    continue;
                }
            },
        };
        let lhs = parse_linear(&mut ctx, sides.0, false);
        let rhs = parse_linear(&mut ctx, sides.1, false);
        let (Some(lhs), Some(rhs)) = (lhs, rhs) else { continue };
        let mut rate_pieces = Vec::new();
        let mut rem = rates;
        while let Some((a, b)) = rem.split_once(";") {
            rate_pieces.push(a.trim());
            rem = b;
        }
        rate_pieces.push(rem.trim());
        let want = if reversible { 2 } else { 1 };
        if rate_pieces.len() != want {
            ctx.error(rates.at, rates.end(), format!("expected {want} rate expression(s), found {}", rate_pieces.len()));
            continue;
        }
        for t in lhs.iter().chain(&rhs) {
            if !mentioned.iter().any(|m| m == t.name.text) {
                mentioned.push(t.name.text.to_string());
            }
        }
        lines.push(Line::Reaction { label, lhs, rhs, rates: rate_pieces, reversible, whole: p });
    }

    let species: Vec<String> = match &header {
        Some(h) => {
            for l in &lines {
                if let Line::Reaction { lhs, rhs, .. } = l {
                    for t in lhs.iter().chain(rhs) {
                        if !h.iter().any(|x| x == t.name.text) {
                            ctx.error(t.name.at, t.name.end(), format!("species `{}` not declared in header", t.name.text));
                        }
                    }
                }
            }
            h.clone()
        }
        None => mentioned,
    };

    // Concentration symbols and aliases.
    let conc: Vec<Symbol> = species.iter().map(|s| Symbol::new(&conc_name(s))).collect();
    let mut alias: HashMap<String, usize> = HashMap::new();
    for (j, s) in species.iter().enumerate() {
        for name in [conc_name(s), folded_name(s)] {
            if let Some(&other) = alias.get(&name) {
                if other != j {
                    ctx.error(0, 0, format!("species `{}` and `{}` share concentration symbol `{name}`", species[other], s));
                }
            }
            alias.insert(name, j);
        }
    }
    let species_index = |name: &str| species.iter().position(|s| s == name);

    let mut constants: BTreeMap<Symbol, Option<Q>> = BTreeMap::new();
    for l in &lines {
        if let Line::Const { name, value } = l {
            if !is_ident(name.text) {
                ctx.error(name.at, name.end(), format!("invalid constant name `{}`", name.text));
                continue;
            }
            if alias.contains_key(name.text) {
                ctx.error(name.at, name.end(), format!("constant `{}` clashes with a concentration symbol", name.text));
                continue;
            }
            let v = match value {
                None => None,
                Some(vp) => match parse_expr_raw(vp.text).map(|e| e.simplify()) {
                    Ok(Expr::Num(q)) => Some(q),
                    Ok(_) => {
                        ctx.error(vp.at, vp.end(), "constant value must be a number");
                        continue;
                    }
                    Err(e) => {
                        ctx.error(vp.at + e.offset, vp.at + e.offset + e.len, e.message);
                        continue;
                    }
                },
            };
            constants.insert(Symbol::new(name.text), v);
        }
    }

    let m = species.len();
    let mut net = Network::new(species.clone());
    let mut rates = Vec::new();
    let mut free = Vec::new();
    let mut pending_translations: Vec<(Piece, Vec<(usize, i64)>, Piece)> = Vec::new();
    let subst: HashMap<Symbol, Expr> = alias
        .iter()
        .filter(|(name, &j)| **name != conc_name(&species[j]))
        .map(|(name, &j)| (Symbol::new(name), Expr::Sym(conc[j].clone())))
        .collect();

    let to_complex = |terms: &[Term]| -> Option<Complex> {
        let mut v = vec![0; m];
        for t in terms {
            v[species_index(t.name.text)?] += t.coef;
        }
        Some(Complex(v))
    };

    for l in &lines {
        match l {
            Line::Reaction { label, lhs, rhs, rates: rp, reversible, whole } => {
                let (Some(src_c), Some(prod_c)) = (to_complex(lhs), to_complex(rhs)) else { continue };
                let mut exprs = Vec::new();
                for p in rp {
                    match parse_rate(&mut ctx, *p, &alias, &constants, &subst) {
                        Some(e) => exprs.push(e),
                        None => break,
                    }
                }
                if exprs.len() != rp.len() {
                    continue;
                }
                let pairs: Vec<(String, Complex, Complex)> = if *reversible {
                    vec![
                        (format!("{}f", label.text), src_c.clone(), prod_c.clone()),
                        (format!("{}r", label.text), prod_c, src_c),
                    ]
                } else {
                    vec![(label.text.to_string(), src_c, prod_c)]
                };
                for ((lab, s, p), e) in pairs.into_iter().zip(exprs) {
                    let tag = classify_rate(&e, &s, &conc);
                    match net.add_reaction(&lab, s, p) {
                        Ok(_) => rates.push(RateLaw { expr: e, tag }),
                        Err(err) => {
                            let msg = match err {
                                Error::Structural(m) => m,
                                other => other.to_string(),
                            };
                            ctx.error(whole.at, whole.end(), msg);
                        }
                    }
                }
            }
            Line::Free(names) => {
                for n in names {
                    match species_index(n.text).or_else(|| alias.get(n.text).copied()) {
                        Some(j) if !free.contains(&j) => free.push(j),
                        Some(_) => {}
                        None => ctx.error(n.at, n.end(), format!("unknown species `{}` in free directive", n.text)),
                    }
                }
            }
            Line::Translate { label, terms, whole } => {
                let mut shift = Vec::new();
                let mut ok = true;
                for t in terms {
                    match species_index(t.name.text) {
                        Some(j) => shift.push((j, t.coef)),
                        None => {
                            ctx.error(t.name.at, t.name.end(), format!("unknown species `{}`", t.name.text));
                            ok = false;
                        }
                    }
                }
                if ok {
                    pending_translations.push((*label, shift, *whole));
                }
            }
            Line::Const { .. } => {}
        }
    }

    let mut translations = Vec::new();
    for (label, shift, whole) in pending_translations {
        let targets: Vec<usize> = match net.reaction_index(label.text) {
            Some(r) => vec![r],
            None => {
                let f = net.reaction_index(&format!("{}f", label.text));
                let r = net.reaction_index(&format!("{}r", label.text));
                f.into_iter().chain(r).collect()
            }
        };
        if targets.is_empty() {
            ctx.error(label.at, label.end(), format!("unknown reaction `{}` in translate directive", label.text));
            continue;
        }
        let mut v = vec![0; m];
        for (j, c) in shift {
            v[j] += c;
        }
        for r in targets {
            if net.source(r).shifted(&v).is_none() || net.product(r).shifted(&v).is_none() {
                ctx.error(whole.at, whole.end(), format!("translation of {} makes a coefficient negative", net.reactions()[r].label));
                continue;
            }
            translations.push(Translation { reaction: r, shift: v.clone() });
        }
    }

    if net.r() == 0 && ctx.diags.is_empty() {
        ctx.error(0, src.len().min(1), "no reactions");
    }
    if ctx.diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(Error::Parse(ctx.diags));
    }
    Ok(Model { network: net, kinetics: Kinetics { rates, conc, constants }, free, translations })
}

fn parse_rate(
    ctx: &mut Ctx,
    p: Piece,
    alias: &HashMap<String, usize>,
    constants: &BTreeMap<Symbol, Option<Q>>,
    subst: &HashMap<Symbol, Expr>,
) -> Option<Expr> {
    let e = match parse_expr_raw(p.text) {
        Ok(e) => e,
        Err(ExprParseError { message, offset, len }) => {
            ctx.error(p.at + offset, p.at + offset + len, format!("in rate expression: {message}"));
            return None;
        }
    };
    let mut ok = true;
    if let Ok(ids) = crate::symbolic::parse::identifiers(p.text) {
        for (id, off) in ids {
            if alias.contains_key(&id) || constants.contains_key(&Symbol::new(&id)) || id.starts_with('k') {
                continue;
            }
            ctx.error(p.at + off, p.at + off + id.len(), format!("unknown species `{id}` in rate expression"));
            ok = false;
        }
    }
    ok.then(|| e.subst(subst).simplify())
}

/// Canonical text for a model; parsing it back yields an equal model.
pub fn render_network(model: &Model) -> String {
    let net = &model.network;
    let mut out = String::new();
    out.push_str("species");
    for s in net.species() {
        out.push(' ');
        out.push_str(s);
    }
    out.push('\n');
    for (s, v) in &model.kinetics.constants {
        match v {
            Some(q) => out.push_str(&format!("const {s} = {}\n", Expr::Num(q.clone()))),
            None => out.push_str(&format!("const {s}\n")),
        }
    }
    if !model.free.is_empty() {
        let names: Vec<&str> = model.free.iter().map(|&j| net.species()[j].as_str()).collect();
        out.push_str(&format!("free {}\n", names.join(" ")));
    }
    for r in 0..net.r() {
        out.push_str(&format!("{} ; {}\n", net.render_reaction(r), model.kinetics.rates[r].expr));
    }
    for t in &model.translations {
        out.push_str(&format!(
            "translate {} by {}\n",
            net.reactions()[t.reaction].label,
            crate::crn::render_linear(&t.shift, net.species())
        ));
    }
    out
}

/// A user-supplied steady-state parametrization: one `species = expr` line per
/// dependent species, optionally a `free` line.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamFile {
    /// `(species index, expression)` in file order.
    pub entries: Vec<(usize, Expr)>,
    pub free: Vec<usize>,
}

/// Writes `entries` in the `.par` format read by [`parse_parametrization`].
/// Species that are their own free parameter are left out.
pub fn render_parametrization(entries: &[(usize, Expr)], model: &Model) -> String {
    entries
        .iter()
        .filter(|(j, e)| !matches!(e, Expr::Sym(s) if s == model.conc_symbol(*j)))
        .map(|(j, e)| format!("{} = {e}\n", model.conc_symbol(*j)))
        .collect()
}

pub fn parse_parametrization(src: &str, model: &Model) -> Result<ParamFile> {
    let mut ctx = Ctx { src, diags: Vec::new() };
    let mut entries: Vec<(usize, Expr)> = Vec::new();
    let mut free = Vec::new();
    let mut offset = 0;
    let lookup = |name: &str| model.species_by_name_or_conc(name).or_else(|| model.kinetics.conc.iter().position(|c| folded_name(c.as_str()) == name));
    for raw in src.split('\n') {
        let at = offset;
        offset += raw.len() + 1;
        let body = strip_comment(raw.strip_suffix('\r').unwrap_or(raw));
        let p = Piece { text: body, at }.trim();
        if p.text.is_empty() {
            continue;
        }
        if let Some(rest) = keyword(p, "free") {
            for w in rest.words() {
                match lookup(w.text) {
                    Some(j) => free.push(j),
                    None => ctx.error(w.at, w.end(), format!("unknown species `{}`", w.text)),
                }
            }
            continue;
        }
        let Some((lhs, rhs)) = p.split_once("=") else {
            ctx.error(p.at, p.end(), "expected `species = expression`");
            continue;
        };
        let lhs = lhs.trim();
        let Some(j) = lookup(lhs.text) else {
            ctx.error(lhs.at, lhs.end(), format!("unknown species `{}`", lhs.text));
            continue;
        };
        if entries.iter().any(|(k, _)| *k == j) {
            ctx.error(lhs.at, lhs.end(), format!("species `{}` defined twice", lhs.text));
            continue;
        }
        let rhs = rhs.trim();
        match parse_expr_raw(rhs.text) {
            Ok(e) => entries.push((j, e.simplify())),
            Err(e) => ctx.error(rhs.at + e.offset, rhs.at + e.offset + e.len, e.message),
        }
    }
    if !ctx.diags.is_empty() {
        return Err(Error::Parse(ctx.diags));
    }
    Ok(ParamFile { entries, free })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::KineticsTag;

    const THREE_SPECIES: &str = "\
# three species
R1: B + C -> A + C ; k1*b*c
R2: A -> 0 ; k2*a
R3: 0 -> B ; k3
R4: 2C -> C ; k4*c^2
R5: C -> 2C ; k5*c
";

    #[test]
    fn parses_three_species() {
        let m = parse_network(THREE_SPECIES).unwrap();
        assert_eq!(m.network.species(), ["B", "C", "A"]);
        assert_eq!(m.network.r(), 5);
        assert!(m.kinetics.rates.iter().all(|r| r.tag == KineticsTag::MassAction));
        assert_eq!(m.network.summary().delta, 1);
    }

    #[test]
    fn header_fixes_order() {
        let m = parse_network(&format!("species A B C\n{THREE_SPECIES}")).unwrap();
        assert_eq!(m.network.species(), ["A", "B", "C"]);
        assert_eq!(m.network.reaction_vector(0), vec![1, -1, 0]);
    }

    #[test]
    fn self_loop_rejected() {
        let err = parse_network("R: A -> A ; k*a").unwrap_err();
        assert!(err.to_string().contains("self-loop complex"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_identifier_rejected_with_span() {
        let err = parse_network("R1: A -> B ; k1*q").unwrap_err();
        let Error::Parse(d) = err else { panic!() };
        assert_eq!(d[0].span.line, 1);
        assert_eq!(d[0].span.column, 17);
        assert!(d[0].message.contains("unknown species"));
    }

    #[test]
    fn reports_several_errors() {
        let err = parse_network("R1: A -> ; k\nR2 A -> B ; k\nR3: A -> B ; k1*(a\n").unwrap_err();
        let Error::Parse(d) = err else { panic!() };
        assert_eq!(d.len(), 3);
        assert_eq!(d.iter().map(|x| x.span.line).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn reversible_and_crlf() {
        let m = parse_network("R1: A + E <-> AE ; k1*a*e ; k2*ae\r\nR2: AE -> B + E ; k3*ae\r\n").unwrap();
        let labels: Vec<_> = m.network.reactions().iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["R1f", "R1r", "R2"]);
    }

    #[test]
    fn folded_concentration_alias() {
        let m = parse_network("R1: AE -> B ; k1*aE").unwrap();
        assert_eq!(m.kinetics.rates[0].expr.to_string(), "ae*k1");
    }

    #[test]
    fn render_round_trip() {
        let src = "species A B C\nconst alpha = 2\nfree B\nR1: B + C -> A + C ; k1*b*c/(1 + a^alpha)\nR2: A -> 0 ; k2*a\ntranslate R2 by C\n";
        let m = parse_network(src).unwrap();
        let text = render_network(&m);
        let m2 = parse_network(&text).unwrap();
        assert_eq!(m, m2);
        assert_eq!(render_network(&m2), text);
    }

    #[test]
    fn empty_input() {
        let err = parse_network("# nothing\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn parametrization_file() {
        let m = parse_network(THREE_SPECIES).unwrap();
        let p = parse_parametrization("a = k3/k2\nc = k5/k4 # comment\nfree b\n", &m).unwrap();
        assert_eq!(p.entries.len(), 2);
        assert_eq!(p.free, vec![0]);
        assert!(parse_parametrization("z = 1", &m).is_err());
    }
}
