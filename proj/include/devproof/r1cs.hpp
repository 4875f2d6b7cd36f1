#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devproof/bytes.hpp"
#include "devproof/field.hpp"

namespace devproof::r1cs {

using field::Fp;

/// One nonzero matrix entry; rows and columns are 1-based.
struct Entry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    Fp value;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Square sparse matrix with entries kept sorted by (row, col), at most one
/// entry per position and no explicit zeros.
class SparseMatrix {
public:
    SparseMatrix() : SparseMatrix(0, field::kRuntimePrime) {}
    SparseMatrix(std::uint32_t dim, std::uint64_t modulus) : dim_(dim), modulus_(modulus) {}
    /// Canonicalizes: sorts, rejects duplicates and out-of-range positions, drops zeros.
    SparseMatrix(std::uint32_t dim, std::uint64_t modulus, std::vector<Entry> entries);

    std::uint32_t dim() const { return dim_; }
    std::uint64_t modulus() const { return modulus_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Adds `value` into position (row, col), keeping canonical order.
    void accumulate(std::uint32_t row, std::uint32_t col, const Fp& value);

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::uint32_t dim_;
    std::uint64_t modulus_;
    std::vector<Entry> entries_;
};

bool is_strictly_lower_triangular(const SparseMatrix& m);
bool is_diagonal(const SparseMatrix& m);
std::vector<Entry> nonzero_entries(const SparseMatrix& m);

/// (A z) o (B z) = C z over F_p with z of length n and z_1 = 1.
struct Instance {
    std::uint32_t n = 0;
    std::uint64_t modulus = field::kRuntimePrime;
    /// Columns of z that are public: inputs, the declared output, then any
    /// bound inputs. The output may share a column with an input.
    std::vector<std::uint32_t> public_positions;
    SparseMatrix a;
    SparseMatrix b;
    SparseMatrix c;

    std::size_t num_public() const { return public_positions.size(); }
    /// Largest entry count among A, B and C.
    std::size_t nnz_max() const;
    const SparseMatrix& matrix(std::size_t which) const;

    friend bool operator==(const Instance&, const Instance&) = default;
};

struct Assignment {
    std::vector<Fp> z;

    /// 1-based access, matching matrix column numbers.
    const Fp& at(std::uint32_t k) const { return z.at(k - 1); }
    std::size_t size() const { return z.size(); }
};

/// Brute-force row-by-row check; throws ArityError if z has the wrong length.
bool is_satisfied(const Instance& inst, const Assignment& z);

enum class GateOp { Add, Mul, ConstMul };

/// Wire indices: w0 is the constant one, w1..wk the inputs, and gate g
/// defines wire k + 1 + g. ConstMul reads only `left` and uses `constant`.
struct Gate {
    GateOp op = GateOp::Mul;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::int64_t constant = 0;
};

struct GateProgram {
    std::uint32_t num_inputs = 0;
    std::vector<Gate> gates;
    std::uint32_t output = 0;

    std::uint32_t num_wires() const { return 1 + num_inputs + static_cast<std::uint32_t>(gates.size()); }
};

/// Throws NonCausalGate if any gate reads a wire that is not yet defined.
void check_causal(const GateProgram& prog);

/// Compiles to normal form: A, B strictly lower triangular, C diagonal.
/// Column 1 is the constant wire, inputs follow, then one column per mul gate,
/// then (if the output is not already a column) a row materializing it, then
/// `bound_inputs` unconstrained public columns.
Instance build_program(const GateProgram& prog, std::uint64_t modulus, std::uint32_t bound_inputs = 0);

/// Values of every wire w0..w_last under direct execution.
std::vector<Fp> execute(const GateProgram& prog, std::span<const Fp> inputs);

/// Full assignment z matching build_program's column layout.
Assignment make_assignment(const GateProgram& prog, std::span<const Fp> inputs,
                           std::span<const Fp> bound = {});

/// Text format: `inputs <k>`, then one `w<i> = mul|add w<a> w<b>` or
/// `w<i> = cmul <const> w<a>` per line, then `output w<j>`. `#` starts a comment.
GateProgram parse_program(std::string_view text);
std::string format_program(const GateProgram& prog);
GateProgram load_program(const std::string& path);

void write_matrix(ByteWriter& out, const SparseMatrix& m);
SparseMatrix read_matrix(ByteReader& in, std::uint64_t modulus);
void write_instance(ByteWriter& out, const Instance& inst);
Instance read_instance(ByteReader& in);

} // namespace devproof::r1cs
