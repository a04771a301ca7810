//! Weight-grid verification sweeps: for every weight up to a bound, check
//! the Hodge kernel against its closed form, the horizontal kernel against
//! the character enumeration, the Fredholm gate against the sign analysis,
//! and the duality of the boundary split. Runs in parallel over weights;
//! `CUSPTOR_THREADS` caps the worker count.

use rayon::prelude::*;

use super::boundary::{boundary_cohomology, fredholm_and_l2b_kernel};
use super::chars::{hodge_kernel_monomials, ker_eth_s};
use super::complex::build_dc;
use super::hodge::ComplexGraph;
use super::{KostantError, Signature, Weight};

/// Per-weight closure of the sweep, merged into a `SignatureReport`.
#[derive(Debug, Default, Clone)]
struct WeightOutcome {
    hodge_failure: Option<String>,
    horizontal_failure: Option<String>,
    fredholm_failure: Option<String>,
    duality_failure: Option<String>,
    differential_failure: Option<String>,
    skipped_unsupported: bool,
    not_fredholm: bool,
}

#[derive(Debug, Clone)]
pub struct SignatureReport {
    pub signature: Signature,
    pub max_entry: u32,
    pub weights_checked: u64,
    pub unsupported_skipped: u64,
    pub not_fredholm_count: u64,
    pub hodge_failures: Vec<String>,
    pub horizontal_failures: Vec<String>,
    pub fredholm_failures: Vec<String>,
    pub duality_failures: Vec<String>,
    pub differential_failures: Vec<String>,
}

impl SignatureReport {
    pub fn pass(&self) -> bool {
        self.hodge_failures.is_empty()
            && self.horizontal_failures.is_empty()
            && self.fredholm_failures.is_empty()
            && self.duality_failures.is_empty()
            && self.differential_failures.is_empty()
            && self.not_fredholm_gate_exact()
    }

    /// NotFredholm must occur exactly on the single zero weight when there
    /// is no real place, and never otherwise.
    pub fn not_fredholm_gate_exact(&self) -> bool {
        let expected = if self.signature.r1 == 0 { 1 } else { 0 };
        self.not_fredholm_count == expected
    }
}

#[derive(Debug, Clone)]
pub struct GridReport {
    pub max_entry: u32,
    pub signatures: Vec<SignatureReport>,
}

impl GridReport {
    pub fn pass(&self) -> bool {
        self.signatures.iter().all(|s| s.pass())
    }
}

/// All weights for a signature with entries ≤ max_entry, odometer order.
pub(crate) fn weight_grid(sig: Signature, max_entry: u32) -> Vec<Weight> {
    let slots = sig.r1 + 2 * sig.r2;
    let radix = max_entry as u64 + 1;
    let count = radix.pow(slots as u32);
    let mut out = Vec::with_capacity(count as usize);
    let mut cursor = vec![0u32; slots];
    loop {
        let m = cursor[..sig.r1].to_vec();
        let n: Vec<u32> = (0..sig.r2).map(|j| cursor[sig.r1 + 2 * j]).collect();
        let nbar: Vec<u32> = (0..sig.r2).map(|j| cursor[sig.r1 + 2 * j + 1]).collect();
        out.push(Weight::new(m, n, nbar));
        let mut i = 0;
        loop {
            if i == slots {
                return out;
            }
            cursor[i] += 1;
            if cursor[i] <= max_entry {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
    }
}

/// Fully decoded complex for one weight: digit values and form flags are
/// tabulated once (by odometer, no divisions), and the differential moves
/// become constant-time bit arithmetic.
struct DecodedComplex {
    n: u64,
    places: usize,
    bounds: Vec<u8>,
    deltas: Vec<u64>,
    ks: Vec<u8>,
    flags: Vec<u16>,
    degree: Vec<u8>,
}

impl DecodedComplex {
    fn build(sig: Signature, weight: &Weight) -> DecodedComplex {
        let mut bounds: Vec<u8> = Vec::with_capacity(sig.degree());
        bounds.extend(weight.m.iter().map(|&x| x as u8));
        for j in 0..sig.r2 {
            bounds.push(weight.n[j] as u8);
            bounds.push(weight.nbar[j] as u8);
        }
        let places = bounds.len();
        let mut n = 1u64;
        let mut deltas = Vec::with_capacity(places);
        for &b in &bounds {
            deltas.push(n * (b as u64 + 2));
            n *= 2 * (b as u64 + 1);
        }
        let mut ks = vec![0u8; n as usize * places];
        let mut flags = vec![0u16; n as usize];
        let mut degree = vec![0u8; n as usize];
        let mut cur_k = vec![0u8; places];
        let mut cur_f = vec![false; places];
        for code in 0..n as usize {
            ks[code * places..(code + 1) * places].copy_from_slice(&cur_k);
            let mut mask = 0u16;
            let mut deg = 0u8;
            for (t, &f) in cur_f.iter().enumerate() {
                if f {
                    mask |= 1 << t;
                    deg += 1;
                }
            }
            flags[code] = mask;
            degree[code] = deg;
            // odometer step over (k, flag) digits
            let mut t = 0;
            while t < places {
                if !cur_f[t] {
                    if cur_k[t] < bounds[t] {
                        cur_k[t] += 1;
                        break;
                    }
                    cur_k[t] = 0;
                    cur_f[t] = true;
                    break;
                }
                if cur_k[t] < bounds[t] {
                    cur_k[t] += 1;
                    break;
                }
                cur_k[t] = 0;
                cur_f[t] = false;
                t += 1;
            }
        }
        DecodedComplex { n, places, bounds, deltas, ks, flags, degree }
    }

    #[inline]
    fn sign_below(&self, code: u64, t: usize) -> i64 {
        let below = self.flags[code as usize] & ((1u16 << t) - 1);
        if below.count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Code of a monomial in the same digit layout as `FiniteComplex`.
    fn code_of(&self, sig: Signature, m: &super::KostantMonomial) -> u64 {
        let mut digits: Vec<(u8, bool)> = Vec::with_capacity(self.places);
        for i in 0..sig.r1 {
            digits.push((m.k[i] as u8, m.dx[i]));
        }
        for j in 0..sig.r2 {
            digits.push((m.l[j] as u8, m.dz[j]));
            digits.push((m.lbar[j] as u8, m.dzbar[j]));
        }
        let mut code = 0u64;
        let mut stride = 1u64;
        for (t, &(k, flag)) in digits.iter().enumerate() {
            let b = self.bounds[t] as u64;
            code += (k as u64 + if flag { b + 1 } else { 0 }) * stride;
            stride *= 2 * (b + 1);
        }
        code
    }
}

impl ComplexGraph for DecodedComplex {
    fn dim(&self) -> u64 {
        self.n
    }

    fn degree_of(&self, code: u64) -> usize {
        self.degree[code as usize] as usize
    }

    fn for_each_out(&self, code: u64, mut f: impl FnMut(u64, i64)) {
        let base = code as usize * self.places;
        let flags = self.flags[code as usize];
        for t in 0..self.places {
            if flags >> t & 1 == 1 {
                continue;
            }
            let k = self.ks[base + t];
            if k < self.bounds[t] {
                f(code + self.deltas[t], (self.bounds[t] - k) as i64 * self.sign_below(code, t));
            }
        }
    }

    fn for_each_in(&self, code: u64, mut f: impl FnMut(u64, i64)) {
        let base = code as usize * self.places;
        let flags = self.flags[code as usize];
        for t in 0..self.places {
            if flags >> t & 1 == 0 {
                continue;
            }
            let k = self.ks[base + t];
            if k > 0 {
                f(
                    code - self.deltas[t],
                    (self.bounds[t] - k + 1) as i64 * self.sign_below(code, t),
                );
            }
        }
    }
}

/// A coupled component is, up to basis permutation and sign conjugation,
/// determined by the multiset of (bound, section offset) pairs over the
/// places where it has both options; the representative's harmonic
/// dimensions (by degree relative to the component bottom) are memoized.
type TypeCache = std::collections::HashMap<Vec<(u8, u8)>, Vec<u64>>;

/// The representative component of a type: basis = subsets of the active
/// places, differential wedges place t with constant coefficient
/// bound_t − ν_t and the parity sign.
struct RepComponent {
    weights: Vec<i64>,
}

impl ComplexGraph for RepComponent {
    fn dim(&self) -> u64 {
        1u64 << self.weights.len()
    }

    fn degree_of(&self, code: u64) -> usize {
        code.count_ones() as usize
    }

    fn for_each_out(&self, code: u64, mut f: impl FnMut(u64, i64)) {
        for t in 0..self.weights.len() {
            if code >> t & 1 == 0 {
                let sign = if (code & ((1 << t) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                f(code | 1 << t, self.weights[t] * sign);
            }
        }
    }

    fn for_each_in(&self, code: u64, mut f: impl FnMut(u64, i64)) {
        for t in 0..self.weights.len() {
            if code >> t & 1 == 1 {
                let sign = if (code & ((1 << t) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                f(code & !(1 << t), self.weights[t] * sign);
            }
        }
    }
}

fn type_harmonic_dims(cache: &mut TypeCache, key: Vec<(u8, u8)>) -> Vec<u64> {
    if let Some(hit) = cache.get(&key) {
        return hit.clone();
    }
    let rep = RepComponent {
        weights: key.iter().map(|&(b, nu)| (b - nu) as i64).collect(),
    };
    let codes: Vec<u64> = (0..rep.dim()).collect();
    let dims = crate::kostant::hodge::component_harmonic_dims(&rep, &codes);
    let mut out = vec![0u64; rep.weights.len() + 1];
    for (q, h) in dims {
        out[q] += h;
    }
    cache.insert(key, out.clone());
    out
}

/// Harmonic profile of a decoded complex using the component-type cache.
fn cached_profile(g: &DecodedComplex, cache: &mut TypeCache) -> crate::kostant::hodge::HarmonicProfile {
    let n = g.n;
    let mut dims: Vec<u64> = Vec::new();
    let mut singletons = Vec::new();
    let mut extra = 0u64;
    let mut visited = vec![false; n as usize];
    let mut stack: Vec<u64> = Vec::new();
    let mut component: Vec<u64> = Vec::new();
    let bump = |dims: &mut Vec<u64>, q: usize, h: u64| {
        if dims.len() <= q {
            dims.resize(q + 1, 0);
        }
        dims[q] += h;
    };
    for start in 0..n {
        if visited[start as usize] {
            continue;
        }
        component.clear();
        stack.push(start);
        visited[start as usize] = true;
        while let Some(c) = stack.pop() {
            component.push(c);
            g.for_each_out(c, |t, _| {
                if !visited[t as usize] {
                    visited[t as usize] = true;
                    stack.push(t);
                }
            });
            g.for_each_in(c, |t, _| {
                if !visited[t as usize] {
                    visited[t as usize] = true;
                    stack.push(t);
                }
            });
        }
        if component.len() == 1 {
            bump(&mut dims, g.degree_of(start), 1);
            singletons.push(start);
            continue;
        }
        component.sort_unstable();
        // type key from the bottom corner: active places are those whose
        // raising move stays inside the component; places carrying a form
        // at the bottom corner are frozen extremes
        let e_min = component[0];
        let base = e_min as usize * g.places;
        let mut key: Vec<(u8, u8)> = Vec::new();
        for t in 0..g.places {
            if g.flags[e_min as usize] >> t & 1 == 1 {
                continue;
            }
            let k = g.ks[base + t];
            if k < g.bounds[t] && component.binary_search(&(e_min + g.deltas[t])).is_ok() {
                key.push((g.bounds[t], k));
            }
        }
        if component.len() == 1usize << key.len() {
            key.sort_unstable();
            let offset = g.degree_of(e_min);
            let rel = type_harmonic_dims(cache, key);
            for (q, &h) in rel.iter().enumerate() {
                if h > 0 {
                    bump(&mut dims, offset + q, h);
                    extra += h;
                }
            }
        } else {
            // unexpected component shape: analyze it directly
            for (q, h) in crate::kostant::hodge::component_harmonic_dims(g, &component) {
                if h > 0 {
                    bump(&mut dims, q, h);
                    extra += h;
                }
            }
        }
    }
    singletons.sort_unstable();
    crate::kostant::hodge::HarmonicProfile { singletons, dims_by_degree: dims, extra }
}

fn check_weight(sig: Signature, weight: &Weight, cache: &mut TypeCache) -> WeightOutcome {
    let mut out = WeightOutcome::default();
    // Hodge kernel against the closed form
    let decoded = DecodedComplex::build(sig, weight);
    let profile = cached_profile(&decoded, cache);
    if profile.extra > 0 {
        out.hodge_failure = Some(format!("{weight}: harmonic vectors outside monomial span"));
    } else {
        let mut closed: Vec<u64> = hodge_kernel_monomials(sig, weight)
            .iter()
            .map(|m| decoded.code_of(sig, m))
            .collect();
        closed.sort_unstable();
        if closed != profile.singletons {
            out.hodge_failure = Some(format!("{weight}: kernel monomials differ from closed form"));
        }
        let expected = 1u64 << sig.degree();
        let total: u64 = profile.dims_by_degree.iter().sum();
        if total != expected {
            out.hodge_failure = Some(format!("{weight}: kernel dimension {total} != {expected}"));
        }
    }
    // structural spot checks on moderate complexes: d squared vanishes
    // (inside build_dc) and the differential preserves the weight operator
    if decoded.n <= 4096 {
        match build_dc(sig, weight, u64::MAX) {
            Ok(complex) => {
                let w_doubled = |code: u64| -> i64 {
                    let m = complex.monomial(code);
                    2 * m.form_degree() as i64 + weight.abs_m() + weight.abs_n()
                        - 2 * (m.k.iter().chain(&m.l).chain(&m.lbar).map(|&x| x as i64))
                            .sum::<i64>()
                };
                for code in 0..complex.total_dim() {
                    let w0 = w_doubled(code);
                    complex_for_each_out(&complex, code, |t, _| {
                        if w_doubled(t) != w0 && out.differential_failure.is_none() {
                            out.differential_failure =
                                Some(format!("{weight}: differential moves the weight"));
                        }
                    });
                }
            }
            Err(e) => out.differential_failure = Some(format!("{weight}: {e}")),
        }
    }
    // horizontal kernel, boundary split, Fredholm gate
    match ker_eth_s(sig, weight) {
        Err(KostantError::UnsupportedSignatureWeight) => {
            out.skipped_unsupported = true;
            return out;
        }
        Err(e) => {
            out.horizontal_failure = Some(format!("{weight}: {e}"));
            return out;
        }
        Ok(_) => {}
    }
    match boundary_cohomology(sig, weight) {
        Ok(_) => {}
        Err(KostantError::UnsupportedSignatureWeight) => {
            // invariant case: boundary split undefined, kernel itself fine
        }
        Err(e) => out.duality_failure = Some(format!("{weight}: {e}")),
    }
    match fredholm_and_l2b_kernel(sig, weight) {
        Ok(report) => {
            if !report.fredholm {
                out.not_fredholm = true;
                if sig.r1 != 0 || !weight.is_zero() {
                    out.fredholm_failure =
                        Some(format!("{weight}: unexpected Fredholm failure"));
                }
            }
        }
        Err(e) => out.fredholm_failure = Some(format!("{weight}: {e}")),
    }
    out
}

fn complex_for_each_out(
    complex: &super::complex::FiniteComplex,
    code: u64,
    f: impl FnMut(u64, i64),
) {
    ComplexGraph::for_each_out(complex, code, f)
}

/// Sweep every weight with entries ≤ max_entry for one signature.
pub fn verify_signature(sig: Signature, max_entry: u32) -> SignatureReport {
    let weights = weight_grid(sig, max_entry);
    let outcomes: Vec<WeightOutcome> = with_thread_cap(|| {
        weights
            .par_iter()
            .map_with(TypeCache::new(), |cache, w| check_weight(sig, w, cache))
            .collect()
    });
    let mut report = SignatureReport {
        signature: sig,
        max_entry,
        weights_checked: weights.len() as u64,
        unsupported_skipped: 0,
        not_fredholm_count: 0,
        hodge_failures: Vec::new(),
        horizontal_failures: Vec::new(),
        fredholm_failures: Vec::new(),
        duality_failures: Vec::new(),
        differential_failures: Vec::new(),
    };
    for o in outcomes {
        if o.skipped_unsupported {
            report.unsupported_skipped += 1;
        }
        if o.not_fredholm {
            report.not_fredholm_count += 1;
        }
        report.hodge_failures.extend(o.hodge_failure);
        report.horizontal_failures.extend(o.horizontal_failure);
        report.fredholm_failures.extend(o.fredholm_failure);
        report.duality_failures.extend(o.duality_failure);
        report.differential_failures.extend(o.differential_failure);
    }
    report
}

/// Sweep all signatures with field degree ≤ max_degree.
pub fn verify_grid(max_degree: usize, max_entry: u32) -> GridReport {
    let mut signatures = Vec::new();
    for r2 in 0..=max_degree / 2 {
        for r1 in 0..=max_degree.saturating_sub(2 * r2) {
            if r1 + r2 == 0 || r1 + 2 * r2 > max_degree {
                continue;
            }
            signatures.push(Signature::new(r1, r2));
        }
    }
    let reports = signatures
        .into_iter()
        .map(|sig| verify_signature(sig, max_entry))
        .collect();
    GridReport { max_entry, signatures: reports }
}

/// Run a closure under the thread cap requested via CUSPTOR_THREADS.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var("CUSPTOR_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_passes() {
        for (r1, r2) in [(1usize, 0usize), (0, 1), (1, 1), (2, 0)] {
            let report = verify_signature(Signature::new(r1, r2), 2);
            assert!(report.pass(), "({r1},{r2}): {report:?}");
        }
    }

    #[test]
    fn grid_enumeration_counts() {
        let sig = Signature::new(2, 1);
        assert_eq!(weight_grid(sig, 3).len(), 4usize.pow(4));
    }

    #[test]
    fn not_fredholm_gate() {
        let report = verify_signature(Signature::new(0, 2), 2);
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.not_fredholm_count, 1);
    }
}
