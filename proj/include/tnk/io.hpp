#ifndef TNK_IO_HPP
#define TNK_IO_HPP

#include "tnk/tensor_train.hpp"
#include "tnk/tn_graph.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace tnk {

/// Malformed or unreadable data file.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shortest decimal form that round-trips a 64-bit real (17 significant digits).
std::string format_value(double v);

// .ten: line 1 `TEN 1`; line 2 the shape (empty for a scalar); then the
// values in lexicographic order. parse ∘ print is the identity on canonical
// files; all values must be finite.
Tensor read_tensor(std::istream& in);
Tensor read_tensor_file(const std::string& path);
void write_tensor(std::ostream& out, const Tensor& t);
void write_tensor_file(const std::string& path, const Tensor& t);

// .tt: line 1 `TT 1`; line 2 the site count; per site a header
// `CORE k R_prev d R_next` followed by the core values.
TT read_tt(std::istream& in);
TT read_tt_file(const std::string& path);
void write_tt(std::ostream& out, const TT& t);
void write_tt_file(const std::string& path, const TT& t);

// .mpo: same layout with magic `MPO 1` and headers `CORE k R_prev I J R_next`.
MPO read_mpo(std::istream& in);
MPO read_mpo_file(const std::string& path);
void write_mpo(std::ostream& out, const MPO& m);
void write_mpo_file(const std::string& path, const MPO& m);

// .tn: the network grammar verbatim (UTF-8, `#` comments).
TNGraph read_network_file(const std::string& path);

/// Canonical single-line rendering of a network; parse ∘ format is the
/// identity on canonical files.
std::string format_network(const TNGraph& g);

std::string read_text_file(const std::string& path);

}  // namespace tnk

#endif
