#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/model.hpp"

namespace spmld {

// Versioned plain-text checkpoint. Doubles are written as hex floats, so a
// round trip reproduces every factor bit for bit.
struct Checkpoint {
    std::size_t d = 0;
    std::size_t n = 0;
    std::size_t l = 0;
    HyperParams hp;
    ModelState state;
};

namespace detail {

inline void write_hex_matrix(std::ostream& os, const Matrix& m) {
    char buf[48];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%a", m(r, c));
            os << buf << (c + 1 < m.cols() ? ' ' : '\n');
        }
    }
}

inline Matrix read_hex_matrix(std::istream& in, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    std::string tok;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (!(in >> tok)) throw ParseError("checkpoint: truncated matrix block");
            char* end = nullptr;
            m(r, c) = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size())
                throw ParseError("checkpoint: malformed float '" + tok + "'");
        }
    }
    return m;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
    char buf[256];
    os << "spmld-checkpoint 1\n";
    os << "dims " << ckpt.d << ' ' << ckpt.n << ' ' << ckpt.l << ' ' << ckpt.hp.k << ' '
       << ckpt.hp.m << ' ' << ckpt.hp.g << "\n";
    std::snprintf(buf, sizeof(buf), "hyper %a %a %a %a\n", ckpt.hp.alpha, ckpt.hp.beta1,
                  ckpt.hp.beta2, ckpt.hp.tau);
    os << buf;
    os << "U\n";
    detail::write_hex_matrix(os, ckpt.state.U);
    os << "V\n";
    detail::write_hex_matrix(os, ckpt.state.V);
    os << "W\n";
    detail::write_hex_matrix(os, ckpt.state.W);
    for (std::size_t b = 0; b < ckpt.state.Z.size(); ++b) {
        os << "Z " << b << "\n";
        detail::write_hex_matrix(os, ckpt.state.Z[b]);
    }
    os << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in) {
    Checkpoint ckpt;
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "spmld-checkpoint")
        throw ParseError("checkpoint: bad magic");
    if (version != 1) throw UnsupportedFormatError("checkpoint: unknown version");
    if (!(in >> word) || word != "dims") throw ParseError("checkpoint: missing dims");
    if (!(in >> ckpt.d >> ckpt.n >> ckpt.l >> ckpt.hp.k >> ckpt.hp.m >> ckpt.hp.g))
        throw ParseError("checkpoint: malformed dims");
    if (!(in >> word) || word != "hyper") throw ParseError("checkpoint: missing hyper");
    {
        std::string a, b1, b2, t;
        if (!(in >> a >> b1 >> b2 >> t)) throw ParseError("checkpoint: malformed hyper");
        ckpt.hp.alpha = std::strtod(a.c_str(), nullptr);
        ckpt.hp.beta1 = std::strtod(b1.c_str(), nullptr);
        ckpt.hp.beta2 = std::strtod(b2.c_str(), nullptr);
        ckpt.hp.tau = std::strtod(t.c_str(), nullptr);
    }
    ckpt.hp.validate();

    auto expect = [&](const std::string& tag) {
        if (!(in >> word) || word != tag)
            throw ParseError("checkpoint: expected '" + tag + "' block");
    };
    expect("U");
    ckpt.state.U = detail::read_hex_matrix(in, ckpt.l, ckpt.hp.k);
    expect("V");
    ckpt.state.V = detail::read_hex_matrix(in, ckpt.hp.k, ckpt.n);
    expect("W");
    ckpt.state.W = detail::read_hex_matrix(in, ckpt.d, ckpt.hp.k);
    for (std::size_t b = 0; b < ckpt.hp.g; ++b) {
        std::size_t idx = 0;
        if (!(in >> word >> idx) || word != "Z" || idx != b)
            throw ParseError("checkpoint: expected Z block " + std::to_string(b));
        ckpt.state.Z.push_back(detail::read_hex_matrix(in, ckpt.l, ckpt.hp.m));
    }
    expect("end");
    return ckpt;
}

inline std::string checkpoint_to_string(const Checkpoint& ckpt) {
    std::ostringstream os;
    write_checkpoint(os, ckpt);
    return os.str();
}

inline Checkpoint checkpoint_from_string(const std::string& text) {
    std::istringstream in(text);
    return read_checkpoint(in);
}

}  // namespace spmld
