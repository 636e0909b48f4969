#include "tnk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tnk {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw IoError(msg); }

std::string next_line(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) bad("unexpected end of file while reading " + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::size_t> parse_dims(const std::string& line, const std::string& what) {
    std::istringstream is(line);
    std::vector<std::size_t> dims;
    long long v = 0;
    while (is >> v) {
        if (v < 1) bad(what + " dimensions must be positive");
        dims.push_back(static_cast<std::size_t>(v));
    }
    if (!is.eof()) bad("malformed " + what + " dimension line");
    return dims;
}

double next_value(std::istream& in, const std::string& what) {
    double v = 0.0;
    if (!(in >> v)) bad("missing or malformed value in " + what);
    if (!std::isfinite(v)) bad(what + " contains a non-finite value");
    return v;
}

void expect_end(std::istream& in, const std::string& what) {
    std::string tok;
    if (in >> tok) bad("trailing content after " + what + ": " + tok);
}

void read_values(std::istream& in, Tensor& t, const std::string& what) {
    for (std::size_t i = 0; i < t.size(); ++i) t.mutable_values()[i] = next_value(in, what);
}

void write_values(std::ostream& out, const Tensor& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        out << format_value(t.values()[i]) << ((i + 1) % 8 == 0 || i + 1 == t.size() ? '\n' : ' ');
}

std::size_t next_size(std::istream& in, const std::string& what) {
    long long v = 0;
    if (!(in >> v) || v < 0) bad("missing or malformed count in " + what);
    return static_cast<std::size_t>(v);
}

void expect_token(std::istream& in, const std::string& tok, const std::string& what) {
    std::string got;
    if (!(in >> got) || got != tok) bad("expected `" + tok + "` in " + what);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) bad("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open for reading: " + path);
    return in;
}

}  // namespace

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Tensor read_tensor(std::istream& in) {
    if (next_line(in, "tensor file") != "TEN 1") bad("tensor file must start with `TEN 1`");
    Tensor t = Tensor::zeros(parse_dims(next_line(in, "tensor file"), "tensor"));
    read_values(in, t, "tensor file");
    expect_end(in, "tensor file");
    return t;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    out << "TEN 1\n";
    for (std::size_t k = 0; k < t.order(); ++k) out << (k ? " " : "") << t.dim(k);
    out << "\n";
    write_values(out, t);
}

TT read_tt(std::istream& in) {
    if (next_line(in, "tt file") != "TT 1") bad("tt file must start with `TT 1`");
    const std::size_t n = next_size(in, "tt file");
    if (n < 1) bad("tt file must have at least one site");
    TT t;
    for (std::size_t k = 1; k <= n; ++k) {
        expect_token(in, "CORE", "tt file");
        if (next_size(in, "tt core header") != k) bad("tt core headers must be in order");
        const std::size_t r0 = next_size(in, "tt core header");
        const std::size_t d = next_size(in, "tt core header");
        const std::size_t r1 = next_size(in, "tt core header");
        Tensor core = Tensor::zeros({r0, d, r1});
        read_values(in, core, "tt file");
        t.cores.push_back(std::move(core));
    }
    expect_end(in, "tt file");
    try {
        t.validate();
    } catch (const std::exception& e) {
        bad(std::string("inconsistent tt file: ") + e.what());
    }
    return t;
}

void write_tt(std::ostream& out, const TT& t) {
    out << "TT 1\n" << t.sites() << "\n";
    for (std::size_t k = 1; k <= t.sites(); ++k) {
        const Tensor& c = t.cores[k - 1];
        out << "CORE " << k << " " << c.dim(0) << " " << c.dim(1) << " " << c.dim(2) << "\n";
        write_values(out, c);
    }
}

MPO read_mpo(std::istream& in) {
    if (next_line(in, "mpo file") != "MPO 1") bad("mpo file must start with `MPO 1`");
    const std::size_t n = next_size(in, "mpo file");
    if (n < 1) bad("mpo file must have at least one site");
    MPO m;
    for (std::size_t k = 1; k <= n; ++k) {
        expect_token(in, "CORE", "mpo file");
        if (next_size(in, "mpo core header") != k) bad("mpo core headers must be in order");
        const std::size_t r0 = next_size(in, "mpo core header");
        const std::size_t i = next_size(in, "mpo core header");
        const std::size_t j = next_size(in, "mpo core header");
        const std::size_t r1 = next_size(in, "mpo core header");
        Tensor core = Tensor::zeros({r0, i, j, r1});
        read_values(in, core, "mpo file");
        m.cores.push_back(std::move(core));
    }
    expect_end(in, "mpo file");
    try {
        m.validate();
    } catch (const std::exception& e) {
        bad(std::string("inconsistent mpo file: ") + e.what());
    }
    return m;
}

void write_mpo(std::ostream& out, const MPO& m) {
    out << "MPO 1\n" << m.sites() << "\n";
    for (std::size_t k = 1; k <= m.sites(); ++k) {
        const Tensor& c = m.cores[k - 1];
        out << "CORE " << k << " " << c.dim(0) << " " << c.dim(1) << " " << c.dim(2) << " "
            << c.dim(3) << "\n";
        write_values(out, c);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Tensor read_tensor_file(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_tensor(in);
}

void write_tensor_file(const std::string& path, const Tensor& t) {
    std::ofstream out = open_out(path);
    write_tensor(out, t);
}

TT read_tt_file(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_tt(in);
}

void write_tt_file(const std::string& path, const TT& t) {
    std::ofstream out = open_out(path);
    write_tt(out, t);
}

MPO read_mpo_file(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_mpo(in);
}

void write_mpo_file(const std::string& path, const MPO& m) {
    std::ofstream out = open_out(path);
    write_mpo(out, m);
}

TNGraph read_network_file(const std::string& path) { return parse_network(read_text_file(path)); }

std::string format_network(const TNGraph& g) {
    std::ostringstream os;
    for (const TNNode& n : g.nodes) {
        os << n.name << "[";
        for (std::size_t k = 0; k < n.legs.size(); ++k) os << (k ? "," : "") << n.legs[k];
        os << "] ";
    }
    os << "-> [";
    for (std::size_t k = 0; k < g.output.size(); ++k) os << (k ? "," : "") << g.output[k];
    os << "]\n";
    return os.str();
}

}  // namespace tnk
