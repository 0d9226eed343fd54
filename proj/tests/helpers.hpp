#pragma once

#include "symq/error.hpp"
#include "symq/linalg.hpp"
#include "symq/netlist.hpp"
#include "symq/williamson.hpp"

#include <optional>
#include <random>
#include <sstream>
#include <vector>

namespace symq::fixtures {

inline RealMatrix random_symmetric(Index n, std::mt19937& rng, double scale) {
    std::normal_distribution<double> dist(0.0, 1.0);
    RealMatrix a(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) a(i, k) = dist(rng);
    return scale * 0.5 * (a + a.transpose());
}

// exp(J A) with A symmetric is symplectic.
inline RealMatrix random_symplectic(Index n, std::mt19937& rng, double scale) {
    return expm(canonical_j(n) * random_symmetric(2 * n, rng, scale), 1.0);
}

inline RealMatrix symplectic_inverse(const RealMatrix& t) {
    const RealMatrix j = canonical_j(t.rows() / 2);
    return -j * t.transpose() * j;
}

struct StructuredPsd {
    RealMatrix h;
    Index n_nd = 0, n_f = 0, n_ho = 0;
    std::vector<double> omega; // descending
};

// Normal form with the requested sectors, conjugated by a random symplectic map.
inline StructuredPsd structured_psd(Index n_nd, Index n_f, std::vector<double> omega,
                                    std::mt19937& rng, double scale) {
    const Index n_ho = static_cast<Index>(omega.size());
    const Index n = n_nd + n_f + n_ho;
    RealMatrix hd = RealMatrix::Zero(2 * n, 2 * n);
    for (Index i = 0; i < n_f; ++i) hd(n + n_nd + i, n + n_nd + i) = 1.0;
    for (Index a = 0; a < n_ho; ++a) {
        const Index q = n_nd + n_f + a;
        hd(q, q) = omega[static_cast<size_t>(a)];
        hd(n + q, n + q) = omega[static_cast<size_t>(a)];
    }
    const RealMatrix tinv = symplectic_inverse(random_symplectic(n, rng, scale));
    StructuredPsd out;
    out.h = tinv.transpose() * hd * tinv;
    out.h = 0.5 * (out.h + out.h.transpose());
    out.n_nd = n_nd;
    out.n_f = n_f;
    out.n_ho = n_ho;
    std::sort(omega.begin(), omega.end(), std::greater<>());
    out.omega = std::move(omega);
    return out;
}

template <class Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

// LC network with random element values and a random sparse +-1 incidence matrix.
inline Netlist random_lc_netlist(Index n_c, Index m_l, double density, std::mt19937& rng) {
    std::uniform_real_distribution<double> value(0.5, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::ostringstream os;
    for (Index c = 0; c < n_c; ++c) os << "C c" << c << ' ' << value(rng) << '\n';
    for (Index l = 0; l < m_l; ++l) {
        os << "L l" << l << ' ' << value(rng);
        for (Index c = 0; c < n_c; ++c)
            if (unit(rng) < density) os << " c" << c << (unit(rng) < 0.5 ? ":+" : ":-");
        os << '\n';
    }
    return parse_netlist(os.str());
}

} // namespace symq::fixtures
