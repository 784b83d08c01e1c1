#include "fpu/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "fpu/errors.hpp"
#include "fpu/lattice.hpp"

namespace fpu {

Ratio canonical_ratio(double n1, double n2, double n3) {
    std::array<double, 3> n{n1, n2, n3};
    for (double v : n)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("ratio entries must be positive");
    std::sort(n.begin(), n.end());
    const bool integral = std::all_of(n.begin(), n.end(), [](double v) {
        return v == std::floor(v) && v < 1e9;
    });
    if (integral) {
        long g = std::gcd(std::gcd(static_cast<long>(n[0]), static_cast<long>(n[1])),
                          static_cast<long>(n[2]));
        for (double& v : n) v /= static_cast<double>(g);
    }
    return Ratio{n};
}

Ratio parse_ratio(const std::string& text) {
    std::array<double, 3> n{};
    std::stringstream ss(text);
    std::string part;
    int k = 0;
    while (std::getline(ss, part, ':')) {
        if (k >= 3) throw DomainError("ratio needs exactly three entries");
        std::size_t used = 0;
        try {
            n[k] = std::stod(part, &used);
        } catch (const std::exception&) {
            throw DomainError("cannot parse ratio entry '" + part + "'");
        }
        if (used != part.size()) throw DomainError("cannot parse ratio entry '" + part + "'");
        ++k;
    }
    if (k != 3) throw DomainError("ratio needs exactly three entries");
    return canonical_ratio(n[0], n[1], n[2]);
}

std::string to_string(const Ratio& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.n[0] << ':' << r.n[1] << ':' << r.n[2];
    return os.str();
}

TargetSpectrum target_spectrum(const Ratio& r) {
    const double s = r.n[0] * r.n[0] + r.n[1] * r.n[1] + r.n[2] * r.n[2];
    TargetSpectrum t{r.n[2] * r.n[2] / s, r.n[1] * r.n[1] / s, r.n[0] * r.n[0] / s};
    return t;
}

XiEta xi_eta(const TargetSpectrum& t) {
    return {t[0] * t[1] * t[2], t[0] * t[1] + t[1] * t[2] + t[2] * t[0]};
}

RegionReport region_tests(double xi, double eta) {
    RegionReport r{};
    r.T = region_T(xi, eta);
    r.in_image = xi <= 1.0 / 27 && eta <= 1.0 / 3 && r.T <= 0;
    r.nonempty = xi <= 1.0 / 32 && eta <= 2 * xi + 0.25 && r.T <= 0;
    const double g = 8 * xi * xi + eta * eta * eta - 5 * xi * eta - eta * eta / 4 + 9 * xi / 8;
    r.noncompact = xi > 0 && xi < 1.0 / 32 && eta > 0 && eta < 5.0 / 16 && g <= 0;
    r.compact = r.nonempty && !r.noncompact;
    r.on_exceptional_line = std::abs(eta - 4 * xi - 3.0 / 16) < 1e-12;
    return r;
}

namespace {

template <class S>
struct Q {
    S r, s13, s24, eta1, p13, p24, d13, d24;
};

template <class S>
Q<S> quantities(double xi, double eta, S eta2) {
    Q<S> q;
    q.r = std::sqrt(S(1) - S(16) * eta2);
    q.s13 = (S(1) - q.r) / S(4);
    q.s24 = (S(1) + q.r) / S(4);
    q.eta1 = (S(eta) - S(3) * eta2) / S(4);
    q.p13 = (S(xi / 4) - q.s13 * q.eta1) / (q.r / S(2));
    q.p24 = q.eta1 - q.p13;
    q.d13 = q.s13 * q.s13 - S(4) * q.p13;
    q.d24 = q.s24 * q.s24 - S(4) * q.p24;
    return q;
}

// Value of the constraint function that must stay positive for kind k.
double constraint(const FiberQuantities& q, EndKind k) {
    switch (k) {
        case EndKind::Eta1: return q.eta1;
        case EndKind::P13: return q.p13;
        case EndKind::P24: return q.p24;
        case EndKind::D13: return q.d13;
        case EndKind::D24: return q.d24;
        case EndKind::GridEdge: break;
    }
    return 1.0;
}

std::array<double, 4> point_from(const FiberQuantities& q, bool clamp13, bool clamp24) {
    const double r13 = clamp13 ? 0.0 : std::sqrt(std::max(q.d13, 0.0));
    const double r24 = clamp24 ? 0.0 : std::sqrt(std::max(q.d24, 0.0));
    return {(q.s13 - r13) / 2, (q.s24 - r24) / 2, (q.s13 + r13) / 2, (q.s24 + r24) / 2};
}

double maxdiff(const std::array<double, 4>& x, const std::array<double, 4>& y) {
    double m = 0.0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

std::array<double, 4> apply(const std::array<double, 4>& a, int shift, bool reflect) {
    std::array<double, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = a[(i + shift) % 4];
    if (reflect) std::reverse(b.begin(), b.end());
    return b;
}

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int x, int y) { p[find(x)] = find(y); }
};

}  // namespace

bool FiberQuantities::admissible() const {
    return eta1 > 0 && p13 > 0 && p24 > 0 && d13 >= 0 && d24 >= 0;
}

FiberQuantities fiber_quantities(double xi, double eta, double eta2) {
    auto q = quantities<double>(xi, eta, eta2);
    return {q.r, q.s13, q.s24, q.eta1, q.p13, q.p24, q.d13, q.d24};
}

std::string stabilizer_label(const std::array<double, 4>& a, double tol) {
    // Permutation p with b_i = a_{p(i)}; written in cycle notation on 1..4.
    std::vector<std::string> names;
    for (int k = 0; k < 4; ++k) {
        for (bool r : {false, true}) {
            if (k == 0 && !r) continue;
            std::array<int, 4> p{};
            for (int i = 0; i < 4; ++i) p[i] = (i + k) % 4;
            if (r) std::reverse(p.begin(), p.end());
            bool fixes = true;
            for (int i = 0; i < 4; ++i)
                if (std::abs(a[p[i]] - a[i]) > tol * std::max(1.0, std::abs(a[i]))) fixes = false;
            if (!fixes) continue;
            std::string cyc;
            std::array<bool, 4> done{};
            for (int s = 0; s < 4; ++s) {
                if (done[s] || p[s] == s) continue;
                cyc += '(';
                for (int j = s; !done[j]; j = p[j]) {
                    done[j] = true;
                    cyc += static_cast<char>('1' + j);
                }
                cyc += ')';
            }
            names.push_back(cyc);
        }
    }
    if (names.empty()) return "trivial";
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out + "}";
}

std::vector<FiberPoint> solve_fiber_at(double xi, double eta, double eta2) {
    if (region_tests(xi, eta).on_exceptional_line)
        throw IncompleteSchemeError("the scheme is incomplete on the line eta = 4 xi + 3/16");
    if (!(eta2 > 0.0 && eta2 < 1.0 / 16)) throw DomainError("eta2 must lie in (0, 1/16)");
    FiberQuantities q = fiber_quantities(xi, eta, eta2);
    // double roots come out as -1e-17 or so; treat them as zero
    const double tiny = 64 * std::numeric_limits<double>::epsilon();
    if (q.d13 < 0 && q.d13 > -tiny * q.s13 * q.s13) q.d13 = 0;
    if (q.d24 < 0 && q.d24 > -tiny * q.s24 * q.s24) q.d24 = 0;
    if (!q.admissible()) return {};
    FiberPoint p{point_from(q, false, false), eta2, ""};
    p.stabilizer = stabilizer_label(p.a, 1e-9);
    return {p};
}

const char* to_string(EndKind k) {
    switch (k) {
        case EndKind::Eta1: return "eta1";
        case EndKind::P13: return "p13";
        case EndKind::P24: return "p24";
        case EndKind::D13: return "d13";
        case EndKind::D24: return "d24";
        case EndKind::GridEdge: return "grid-edge";
    }
    return "?";
}

const char* to_string(FiberKind k) {
    switch (k) {
        case FiberKind::Empty: return "Empty";
        case FiberKind::FinitePoints: return "FinitePoints";
        case FiberKind::OpenCurves: return "OpenCurves";
        case FiberKind::CompactCurves: return "CompactCurves";
        case FiberKind::Mixed: return "Mixed";
    }
    return "?";
}

namespace {

BranchEnd make_end(double xi, double eta, double eta2, EndKind kind) {
    const FiberQuantities q = fiber_quantities(xi, eta, eta2);
    BranchEnd e{eta2, kind, point_from(q, kind == EndKind::D13, kind == EndKind::D24), false};
    const double amin = *std::min_element(e.a.begin(), e.a.end());
    e.degenerate = kind == EndKind::Eta1 || kind == EndKind::P13 || kind == EndKind::P24 ||
                   kind == EndKind::GridEdge || amin < 1e-9;
    return e;
}

// Bisect the boundary of constraint k between an admissible and a failing eta2.
double bisect_boundary(double xi, double eta, EndKind k, double inside, double outside) {
    double lo = inside, hi = outside;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        const double v = constraint(fiber_quantities(xi, eta, m), k);
        const bool ok = (k == EndKind::D13 || k == EndKind::D24) ? v >= 0 : v > 0;
        (ok ? lo : hi) = m;
    }
    return lo;
}

EndKind first_failing(const FiberQuantities& q) {
    if (!(q.eta1 > 0)) return EndKind::Eta1;
    if (!(q.p13 > 0)) return EndKind::P13;
    if (!(q.p24 > 0)) return EndKind::P24;
    if (!(q.d13 >= 0)) return EndKind::D13;
    return EndKind::D24;
}

// d/d(eta2) of d13 or d24 via a complex step.
double d_derivative(double xi, double eta, double eta2, bool which13) {
    const double h = 1e-30;
    auto q = quantities<std::complex<double>>(xi, eta, std::complex<double>(eta2, h));
    return (which13 ? q.d13 : q.d24).imag() / h;
}

std::vector<std::array<double, 4>> fuzzy_orbit(const std::array<double, 4>& a) {
    std::vector<std::array<double, 4>> out;
    for (int k = 0; k < 4; ++k)
        for (bool r : {false, true}) {
            auto b = apply(a, k, r);
            if (std::none_of(out.begin(), out.end(),
                             [&](const auto& c) { return maxdiff(b, c) < 1e-9; }))
                out.push_back(b);
        }
    return out;
}

// Isolated points: the discriminant touches zero from below at an interior
// maximum while the other constraints hold.
std::vector<FiberPoint> isolated_points(double xi, double eta, const std::vector<double>& hs,
                                        const std::vector<FiberQuantities>& qs) {
    std::vector<FiberPoint> pts;
    const std::size_t n = hs.size();
    for (bool which13 : {true, false}) {
        auto d = [&](std::size_t i) { return which13 ? qs[i].d13 : qs[i].d24; };
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!(d(i) >= d(i - 1) && d(i) >= d(i + 1) && d(i) < 0 && d(i) > -1e-6)) continue;
            double lo = hs[i - 1], hi = hs[i + 1];
            if (!(d_derivative(xi, eta, lo, which13) > 0 && d_derivative(xi, eta, hi, which13) < 0))
                continue;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (lo + hi);
                if (m == lo || m == hi) break;
                (d_derivative(xi, eta, m, which13) > 0 ? lo : hi) = m;
            }
            const FiberQuantities q = fiber_quantities(xi, eta, lo);
            const double dv = which13 ? q.d13 : q.d24;
            const double other = which13 ? q.d24 : q.d13;
            if (std::abs(dv) > 1e-12) continue;
            if (!(q.eta1 > 0 && q.p13 > 0 && q.p24 > 0 && other >= -1e-12)) continue;
            const bool c13 = which13 || q.d13 < 0;
            const bool c24 = !which13 || q.d24 < 0;
            FiberPoint p{point_from(q, c13, c24), lo, ""};
            if (*std::min_element(p.a.begin(), p.a.end()) <= 0) continue;
            p.stabilizer = stabilizer_label(p.a, 1e-9);
            if (std::none_of(pts.begin(), pts.end(),
                             [&](const FiberPoint& o) { return maxdiff(o.a, p.a) < 1e-9; }))
                pts.push_back(p);
        }
    }
    return pts;
}

}  // namespace

FiberPoint FiberBranch::sample(double s) const {
    if (s <= 0.0) return {lo.a, lo.eta2, stabilizer_label(lo.a, 1e-9)};
    if (s >= 1.0) return {hi.a, hi.eta2, stabilizer_label(hi.a, 1e-9)};
    const double e2 = lo.eta2 + s * (hi.eta2 - lo.eta2);
    const FiberQuantities q = fiber_quantities(xi, eta, e2);
    FiberPoint p{point_from(q, false, false), e2, ""};
    p.stabilizer = stabilizer_label(p.a);
    return p;
}

FiberClassification fiber_classify(double xi, double eta, int grid) {
    if (!(xi > 0 && eta > 0)) throw DomainError("fiber_classify needs xi, eta > 0");
    if (grid < 16) throw DomainError("grid too coarse");
    FiberClassification out;
    const RegionReport region = region_tests(xi, eta);

    std::vector<double> hs(grid);
    std::vector<FiberQuantities> qs(grid);
    std::vector<char> ok(grid);
    for (int i = 0; i < grid; ++i) {
        hs[i] = (i + 0.5) / grid / 16.0;
        qs[i] = fiber_quantities(xi, eta, hs[i]);
        ok[i] = qs[i].admissible();
    }

    for (int i = 0; i < grid;) {
        if (!ok[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < grid && ok[j + 1]) ++j;
        BranchEnd ends[2];
        const int inside[2] = {i, j};
        const int outside[2] = {i - 1, j + 1};
        for (int s = 0; s < 2; ++s) {
            if (outside[s] < 0 || outside[s] >= grid) {
                const double edge = s == 0 ? 0.0 : 1.0 / 16;
                ends[s] = make_end(xi, eta, hs[inside[s]], EndKind::GridEdge);
                ends[s].eta2 = edge;
                continue;
            }
            const EndKind k = first_failing(qs[outside[s]]);
            const double b = bisect_boundary(xi, eta, k, hs[inside[s]], hs[outside[s]]);
            ends[s] = make_end(xi, eta, b, k);
        }
        out.branches.push_back(FiberBranch{xi, eta, ends[0], ends[1]});
        i = j + 1;
    }

    out.points = isolated_points(xi, eta, hs, qs);

    if (region.on_exceptional_line) {
        // At eta2 = 1/16 the scheme degenerates (r = 0) and p13 becomes free.
        const double eta1 = (eta - 3.0 / 16) / 4;
        const double lo = std::max(0.0, eta1 - 1.0 / 64), hi = std::min(eta1, 1.0 / 64);
        if (hi - lo > 1e-12)
            throw IncompleteSchemeError("exceptional line with a free p13 segment is not supported");
        if (hi - lo >= -1e-15) {
            const double p13 = 0.5 * (lo + hi), p24 = eta1 - p13;
            if (p13 > 0 && p24 > 0) {
                const double r13 = std::sqrt(std::max(0.0, 1.0 / 16 - 4 * p13));
                const double r24 = std::sqrt(std::max(0.0, 1.0 / 16 - 4 * p24));
                FiberPoint p{{(0.25 - r13) / 2, (0.25 - r24) / 2, (0.25 + r13) / 2, (0.25 + r24) / 2},
                             1.0 / 16, ""};
                p.stabilizer = stabilizer_label(p.a, 1e-9);
                out.points.push_back(p);
            }
        }
    }

    for (const FiberPoint& p : out.points) out.isolated_total += static_cast<int>(fuzzy_orbit(p.a).size());

    // D4 images of every piece, glued at shared non-degenerate endpoints.
    struct Image {
        std::array<double, 4> mid, e0, e1;
        bool g0, g1;
    };
    std::vector<Image> images;
    for (const FiberBranch& b : out.branches) {
        const auto mid = b.sample(0.5).a;
        std::vector<std::array<double, 4>> seen;
        for (int k = 0; k < 4; ++k)
            for (bool r : {false, true}) {
                auto m = apply(mid, k, r);
                if (std::any_of(seen.begin(), seen.end(),
                                [&](const auto& c) { return maxdiff(c, m) < 1e-9; }))
                    continue;
                seen.push_back(m);
                images.push_back({m, apply(b.lo.a, k, r), apply(b.hi.a, k, r), b.lo.degenerate,
                                  b.hi.degenerate});
            }
    }
    Dsu dsu(static_cast<int>(images.size()));
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j) {
            const std::array<std::pair<const std::array<double, 4>*, bool>, 2> ei{
                {{&images[i].e0, images[i].g0}, {&images[i].e1, images[i].g1}}};
            const std::array<std::pair<const std::array<double, 4>*, bool>, 2> ej{
                {{&images[j].e0, images[j].g0}, {&images[j].e1, images[j].g1}}};
            for (const auto& [pa, da] : ei)
                for (const auto& [pb, db] : ej)
                    if (!da && !db && maxdiff(*pa, *pb) < 1e-9)
                        dsu.unite(static_cast<int>(i), static_cast<int>(j));
        }
    std::vector<int> roots;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const int r = dsu.find(static_cast<int>(i));
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            out.components.push_back({false, 0});
            it = roots.end() - 1;
        }
        FiberComponent& c = out.components[it - roots.begin()];
        c.pieces += 1;
        c.open = c.open || images[i].g0 || images[i].g1;
    }

    const int curves = static_cast<int>(out.components.size());
    const int open = static_cast<int>(
        std::count_if(out.components.begin(), out.components.end(), [](auto& c) { return c.open; }));
    if (curves == 0 && out.isolated_total == 0) {
        out.kind = FiberKind::Empty;
    } else if (curves == 0) {
        out.kind = FiberKind::FinitePoints;
        out.count = out.isolated_total;
    } else if (out.isolated_total == 0 && open == curves) {
        out.kind = FiberKind::OpenCurves;
        out.count = curves;
    } else if (out.isolated_total == 0 && open == 0) {
        out.kind = FiberKind::CompactCurves;
        out.count = curves;
    } else {
        out.kind = FiberKind::Mixed;
        out.count = curves + out.isolated_total;
    }
    return out;
}

double u1_limit() { return 8.0 / 3.0 - (2.0 / 3.0) * std::cbrt(19.0); }

FiberPoint fiber123(double u) {
    if (!(u >= 0.0 && u < u1_limit())) throw DomainError("u must lie in [0, u1)");
    const double r13 = std::sqrt(2.0) / 112 * std::sqrt(u * (6 - u) * (16 - u) / (5 - u));
    const double r24 = 1.0 / (56 * std::sqrt(2.0)) * std::sqrt((6 + u) * (4 - u) * (10 - u) / (5 - u));
    FiberPoint p{{(2 + u) / 56 - r13, (12 - u) / 56 - r24, (2 + u) / 56 + r13, (12 - u) / 56 + r24}, u, ""};
    p.stabilizer = stabilizer_label(p.a);
    return p;
}

SphericalCoords spherical_coords(const std::array<double, 4>& a) {
    const double total = 2 * (a[0] + a[1] + a[2] + a[3]);
    if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("point is not on the hyperplane 2 sum a = 1");
    SphericalCoords s{};
    s.x = {(-a[0] + a[1] - a[2] + a[3]) / 2, (a[3] - a[1]) / std::sqrt(2.0), (a[2] - a[0]) / std::sqrt(2.0)};
    s.rho = std::sqrt(s.x[0] * s.x[0] + 2 * s.x[1] * s.x[1] + 2 * s.x[2] * s.x[2]);
    if (s.rho < 1e-14) throw UndefinedAnglesError("angles undefined at the centre a_j = 1/8");
    s.psi = std::asin(std::clamp(s.x[0] / s.rho, -1.0, 1.0));
    s.phi = std::atan2(s.x[2], s.x[1]);
    return s;
}

std::vector<ResonanceFiber> resonance_table() {
    using K = FiberKind;
    std::vector<ResonanceFiber> t{{"1:1:sqrt2", canonical_ratio(1, 1, std::sqrt(2.0)), K::FinitePoints, 1}};
    const std::vector<std::tuple<const char*, K, int>> rows{
        {"1:1:2", K::FinitePoints, 4}, {"1:2:2", K::Empty, 0},          {"1:2:3", K::OpenCurves, 4},
        {"1:2:4", K::OpenCurves, 12},  {"1:1:1", K::Empty, 0},          {"1:1:3", K::FinitePoints, 4},
        {"1:2:5", K::OpenCurves, 12},  {"1:2:6", K::OpenCurves, 12},    {"1:3:3", K::Empty, 0},
        {"1:3:4", K::OpenCurves, 4},   {"1:3:5", K::OpenCurves, 4},     {"1:3:6", K::OpenCurves, 12},
        {"1:3:7", K::OpenCurves, 12},  {"1:3:9", K::OpenCurves, 12},    {"2:3:4", K::CompactCurves, 2},
        {"2:3:6", K::CompactCurves, 2}};
    for (const auto& [label, kind, count] : rows) t.push_back({label, parse_ratio(label), kind, count});
    return t;
}

}  // namespace fpu
