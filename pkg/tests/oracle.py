"""Independent brute-force re-implementations used to cross-check the
vectorized detector and the statistics helpers.

Everything here is deliberately naive: explicit Python loops, no numpy
vectorization, no shared code with the package beyond plain math.  The
conventions (population sigma with relative floor, distinct-value /
Sturges entropy binning, leave-one-out over kernel centers only) are
restated from scratch so the tests cross-check the implementation, not a
copy of it.
"""

import math

_SIGMA_FLOOR_SCALE = 1e-9
_DISTINCT_BIN_LIMIT = 32


def population_sigma(values):
    m = len(values)
    mean = sum(values) / m
    var = sum((v - mean) ** 2 for v in values) / m
    sigma = math.sqrt(var)
    return max(sigma, _SIGMA_FLOOR_SCALE * max(1.0, abs(mean)))


def kernel_params(values):
    sigma = population_sigma(values)
    tau = 1.0 / (2.0 * sigma * sigma)
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma * sigma)
    return sigma, tau, norm


def entropy_bits(values):
    m = len(values)
    distinct = sorted(set(values))
    if len(distinct) <= _DISTINCT_BIN_LIMIT:
        counts = [sum(1 for v in values if v == d) for d in distinct]
    else:
        n_bins = math.ceil(1 + math.log2(m))
        lo, hi = min(values), max(values)
        width = (hi - lo) / n_bins
        counts = [0] * n_bins
        for v in values:
            idx = n_bins - 1 if v == hi else int((v - lo) / width)
            counts[min(idx, n_bins - 1)] += 1
        counts = [c for c in counts if c > 0]
    h = 0.0
    for c in counts:
        p = c / m
        h -= p * math.log2(p)
    return h


def weights_from_entropies(entropies):
    n = len(entropies)
    if n == 1:
        return [1.0]
    total = sum(entropies)
    if total <= 0.0:
        return [1.0] * n
    return [1.0 - h / total for h in entropies]


def aggregate(terms, psi):
    n = len(terms)
    if psi == "am":
        return sum(terms) / n
    if any(t <= 0.0 for t in terms):
        return 0.0
    if psi == "gm":
        return math.exp(sum(math.log(t) for t in terms) / n)
    if psi == "hm":
        return n / sum(1.0 / t for t in terms)
    raise ValueError(psi)


def column_density(column, x, exclude_index=None):
    """Attribute KDE at x, optionally with one training kernel left out."""
    _, tau, norm = kernel_params(column)
    total = 0.0
    count = 0
    for i, v in enumerate(column):
        if i == exclude_index:
            continue
        total += norm * math.exp(-tau * (v - x) ** 2)
        count += 1
    return total / count


def fit(X, psi):
    """Train the detector naively; returns everything the tests compare."""
    m = len(X)
    n = len(X[0])
    columns = [[X[i][j] for i in range(m)] for j in range(n)]
    entropies = [entropy_bits(col) for col in columns]
    weights = weights_from_entropies(entropies)

    training_scores = []
    for i in range(m):
        terms = []
        for j in range(n):
            d = column_density(columns[j], X[i][j], exclude_index=i)
            terms.append(weights[j] * d)
        training_scores.append(aggregate(terms, psi))

    loo_meta = []
    for i in range(m):
        loo_meta.append(column_density(training_scores, training_scores[i],
                                       exclude_index=i))
    calibration_max = max(loo_meta)
    return {
        "columns": columns,
        "entropies": entropies,
        "weights": weights,
        "training_scores": training_scores,
        "calibration_max": calibration_max,
        "psi": psi,
    }


def score(model, x):
    """s(x) for a test instance against the naive model."""
    terms = []
    for j, column in enumerate(model["columns"]):
        d = column_density(column, x[j])
        terms.append(model["weights"][j] * d)
    return aggregate(terms, model["psi"])


def meta_density(model, s):
    """The training-score KDE evaluated at s."""
    return column_density(model["training_scores"], s)


def auc_pair_counting(scores, labels):
    """AUC by counting positive-negative pairs; ties count one half."""
    pos = [s for s, l in zip(scores, labels) if l == "anomalous"]
    neg = [s for s, l in zip(scores, labels) if l == "normal"]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def t_sf_quadrature(t, df):
    """P(T > t) for Student's t via direct numerical quadrature."""
    from scipy.integrate import quad

    c = (math.gamma((df + 1) / 2.0)
         / (math.sqrt(df * math.pi) * math.gamma(df / 2.0)))

    def pdf(u):
        return c * (1.0 + u * u / df) ** (-(df + 1) / 2.0)

    if t >= 0:
        upper, _ = quad(pdf, t, math.inf, limit=200)
        return upper
    lower, _ = quad(pdf, -math.inf, t, limit=200)
    return 1.0 - lower
