#include "devproof/r1cs.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "devproof/error.hpp"

namespace devproof::r1cs {

namespace {

using LinearComb = std::map<std::uint32_t, Fp>;

enum class Source { Constant, Input, MulWire, Output, Bound };

struct Column {
    Source source;
    std::uint32_t index; // input number, wire number, or bound number
};

// Column allocation shared by build_program and make_assignment.
struct Layout {
    std::vector<Column> columns;         // columns[k-1] describes column k
    std::vector<std::uint32_t> wire_col; // 0 when the wire has no column of its own
    std::uint32_t output_col = 0;
    bool output_materialized = false;
};

Layout layout_of(const GateProgram& prog, std::uint32_t bound_inputs) {
    check_causal(prog);
    Layout lay;
    lay.wire_col.assign(prog.num_wires(), 0);
    lay.columns.push_back({Source::Constant, 0});
    lay.wire_col[0] = 1;
    for (std::uint32_t i = 1; i <= prog.num_inputs; ++i) {
        lay.columns.push_back({Source::Input, i});
        lay.wire_col[i] = static_cast<std::uint32_t>(lay.columns.size());
    }
    for (std::size_t g = 0; g < prog.gates.size(); ++g) {
        if (prog.gates[g].op != GateOp::Mul) continue;
        const auto wire = static_cast<std::uint32_t>(1 + prog.num_inputs + g);
        lay.columns.push_back({Source::MulWire, wire});
        lay.wire_col[wire] = static_cast<std::uint32_t>(lay.columns.size());
    }
    if (lay.wire_col[prog.output] != 0) {
        lay.output_col = lay.wire_col[prog.output];
    } else {
        lay.columns.push_back({Source::Output, prog.output});
        lay.output_col = static_cast<std::uint32_t>(lay.columns.size());
        lay.output_materialized = true;
    }
    for (std::uint32_t i = 0; i < bound_inputs; ++i) lay.columns.push_back({Source::Bound, i});
    return lay;
}

void add_scaled(LinearComb& into, const LinearComb& from, const Fp& scale) {
    for (const auto& [col, v] : from) {
        auto [it, inserted] = into.try_emplace(col, v * scale);
        if (!inserted) it->second += v * scale;
        if (it->second.is_zero()) into.erase(it);
    }
}

void put_row(SparseMatrix& m, std::uint32_t row, const LinearComb& lc) {
    for (const auto& [col, v] : lc) m.accumulate(row, col, v);
}

std::uint32_t parse_wire(std::string_view tok, std::size_t line) {
    std::uint32_t w = 0;
    const char* end = tok.data() + tok.size();
    const bool ok = tok.size() >= 2 && tok[0] == 'w' && [&] {
        auto [ptr, ec] = std::from_chars(tok.data() + 1, end, w);
        return ec == std::errc{} && ptr == end;
    }();
    if (!ok)
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": bad wire '" + std::string(tok) + "'");
    return w;
}

std::int64_t parse_int(std::string_view tok, std::size_t line) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": bad integer '" + std::string(tok) + "'");
    return v;
}

} // namespace

SparseMatrix::SparseMatrix(std::uint32_t dim, std::uint64_t modulus, std::vector<Entry> entries)
    : dim_(dim), modulus_(modulus) {
    for (auto& e : entries) {
        if (e.row < 1 || e.row > dim || e.col < 1 || e.col > dim)
            throw Error(ErrorKind::IndexError, "entry outside " + std::to_string(dim) + "x" + std::to_string(dim));
        if (e.value.modulus() != modulus) throw std::logic_error("entry modulus mismatch");
    }
    std::erase_if(entries, [](const Entry& e) { return e.value.is_zero(); });
    std::sort(entries.begin(), entries.end(),
              [](const Entry& x, const Entry& y) { return std::tie(x.row, x.col) < std::tie(y.row, y.col); });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col)
            throw Error(ErrorKind::EncodingError, "duplicate matrix entry");
    entries_ = std::move(entries);
}

void SparseMatrix::accumulate(std::uint32_t row, std::uint32_t col, const Fp& value) {
    if (row < 1 || row > dim_ || col < 1 || col > dim_) throw Error(ErrorKind::IndexError, "entry out of range");
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                                [](const Entry& e, const std::pair<std::uint32_t, std::uint32_t>& key) {
                                    return std::tie(e.row, e.col) < std::tie(key.first, key.second);
                                });
    if (pos != entries_.end() && pos->row == row && pos->col == col) {
        pos->value += value;
        if (pos->value.is_zero()) entries_.erase(pos);
    } else if (!value.is_zero()) {
        entries_.insert(pos, Entry{row, col, value});
    }
}

bool is_strictly_lower_triangular(const SparseMatrix& m) {
    return std::all_of(m.entries().begin(), m.entries().end(), [](const Entry& e) { return e.row > e.col; });
}

bool is_diagonal(const SparseMatrix& m) {
    return std::all_of(m.entries().begin(), m.entries().end(), [](const Entry& e) { return e.row == e.col; });
}

std::vector<Entry> nonzero_entries(const SparseMatrix& m) { return m.entries(); }

std::size_t Instance::nnz_max() const { return std::max({a.size(), b.size(), c.size()}); }

const SparseMatrix& Instance::matrix(std::size_t which) const {
    switch (which) {
    case 0: return a;
    case 1: return b;
    case 2: return c;
    default: throw std::out_of_range("matrix index");
    }
}

bool is_satisfied(const Instance& inst, const Assignment& z) {
    if (z.size() != inst.n)
        throw Error(ErrorKind::ArityError, "assignment has " + std::to_string(z.size()) + " values, instance needs " +
                                               std::to_string(inst.n));
    const auto p = inst.modulus;
    std::vector<Fp> az(inst.n, Fp::zero(p)), bz(inst.n, Fp::zero(p)), cz(inst.n, Fp::zero(p));
    for (const auto& e : inst.a.entries()) az[e.row - 1] += e.value * z.at(e.col);
    for (const auto& e : inst.b.entries()) bz[e.row - 1] += e.value * z.at(e.col);
    for (const auto& e : inst.c.entries()) cz[e.row - 1] += e.value * z.at(e.col);
    for (std::uint32_t i = 0; i < inst.n; ++i)
        if (az[i] * bz[i] != cz[i]) return false;
    return true;
}

void check_causal(const GateProgram& prog) {
    for (std::size_t g = 0; g < prog.gates.size(); ++g) {
        const auto wire = 1 + prog.num_inputs + g;
        const Gate& gate = prog.gates[g];
        const bool bad = gate.left >= wire || (gate.op != GateOp::ConstMul && gate.right >= wire);
        if (bad) throw Error(ErrorKind::NonCausalGate, "gate defining w" + std::to_string(wire) + " reads a later wire");
    }
    if (prog.output >= prog.num_wires()) throw Error(ErrorKind::NonCausalGate, "output wire is undefined");
}

Instance build_program(const GateProgram& prog, std::uint64_t modulus, std::uint32_t bound_inputs) {
    const Layout lay = layout_of(prog, bound_inputs);
    const auto n = static_cast<std::uint32_t>(lay.columns.size());
    Instance inst{n, modulus, {}, SparseMatrix(n, modulus), SparseMatrix(n, modulus), SparseMatrix(n, modulus)};

    std::vector<LinearComb> lc(prog.num_wires());
    for (std::uint32_t w = 0; w <= prog.num_inputs; ++w) lc[w][lay.wire_col[w]] = Fp::one(modulus);

    for (std::size_t g = 0; g < prog.gates.size(); ++g) {
        const Gate& gate = prog.gates[g];
        const auto wire = static_cast<std::uint32_t>(1 + prog.num_inputs + g);
        switch (gate.op) {
        case GateOp::Add:
            add_scaled(lc[wire], lc[gate.left], Fp::one(modulus));
            add_scaled(lc[wire], lc[gate.right], Fp::one(modulus));
            break;
        case GateOp::ConstMul:
            add_scaled(lc[wire], lc[gate.left], Fp::from_signed(gate.constant, modulus));
            break;
        case GateOp::Mul: {
            const auto row = lay.wire_col[wire];
            put_row(inst.a, row, lc[gate.left]);
            put_row(inst.b, row, lc[gate.right]);
            inst.c.accumulate(row, row, Fp::one(modulus));
            lc[wire][row] = Fp::one(modulus);
            break;
        }
        }
    }
    if (lay.output_materialized) {
        // (output combination) * 1 = z_out
        put_row(inst.a, lay.output_col, lc[prog.output]);
        inst.b.accumulate(lay.output_col, 1, Fp::one(modulus));
        inst.c.accumulate(lay.output_col, lay.output_col, Fp::one(modulus));
    }

    for (std::uint32_t i = 1; i <= prog.num_inputs; ++i) inst.public_positions.push_back(lay.wire_col[i]);
    inst.public_positions.push_back(lay.output_col);
    for (std::uint32_t k = 1; k <= n; ++k)
        if (lay.columns[k - 1].source == Source::Bound) inst.public_positions.push_back(k);
    return inst;
}

std::vector<Fp> execute(const GateProgram& prog, std::span<const Fp> inputs) {
    check_causal(prog);
    if (inputs.size() != prog.num_inputs)
        throw Error(ErrorKind::ArityError, "program takes " + std::to_string(prog.num_inputs) + " inputs, got " +
                                               std::to_string(inputs.size()));
    const std::uint64_t p = inputs.empty() ? field::kRuntimePrime : inputs.front().modulus();
    std::vector<Fp> wires;
    wires.reserve(prog.num_wires());
    wires.push_back(Fp::one(p));
    wires.insert(wires.end(), inputs.begin(), inputs.end());
    for (const Gate& gate : prog.gates) {
        switch (gate.op) {
        case GateOp::Add: wires.push_back(wires[gate.left] + wires[gate.right]); break;
        case GateOp::Mul: wires.push_back(wires[gate.left] * wires[gate.right]); break;
        case GateOp::ConstMul: wires.push_back(Fp::from_signed(gate.constant, p) * wires[gate.left]); break;
        }
    }
    return wires;
}

Assignment make_assignment(const GateProgram& prog, std::span<const Fp> inputs, std::span<const Fp> bound) {
    const auto wires = execute(prog, inputs);
    const Layout lay = layout_of(prog, static_cast<std::uint32_t>(bound.size()));
    Assignment out;
    out.z.reserve(lay.columns.size());
    for (const Column& col : lay.columns) {
        switch (col.source) {
        case Source::Constant: out.z.push_back(wires[0]); break;
        case Source::Input:
        case Source::MulWire:
        case Source::Output: out.z.push_back(wires[col.index]); break;
        case Source::Bound: out.z.push_back(bound[col.index]); break;
        }
    }
    return out;
}

GateProgram parse_program(std::string_view text) {
    GateProgram prog;
    bool have_inputs = false;
    bool have_output = false;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> tok;
        for (std::string w; words >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        const auto where = "line " + std::to_string(lineno);
        if (have_output) throw Error(ErrorKind::ParseError, where + ": content after output");

        if (tok[0] == "inputs") {
            if (have_inputs || tok.size() != 2) throw Error(ErrorKind::ParseError, where + ": bad inputs header");
            const auto k = parse_int(tok[1], lineno);
            if (k < 0) throw Error(ErrorKind::ParseError, where + ": negative input count");
            prog.num_inputs = static_cast<std::uint32_t>(k);
            have_inputs = true;
            continue;
        }
        if (!have_inputs) throw Error(ErrorKind::ParseError, where + ": missing inputs header");
        if (tok[0] == "output") {
            if (tok.size() != 2) throw Error(ErrorKind::ParseError, where + ": bad output footer");
            prog.output = parse_wire(tok[1], lineno);
            have_output = true;
            continue;
        }
        if (tok.size() < 4 || tok[1] != "=") throw Error(ErrorKind::ParseError, where + ": expected 'w<k> = op ...'");
        const auto defined = parse_wire(tok[0], lineno);
        if (defined != prog.num_wires())
            throw Error(ErrorKind::ParseError, where + ": expected w" + std::to_string(prog.num_wires()));
        Gate gate;
        if (tok[2] == "mul" || tok[2] == "add") {
            if (tok.size() != 5) throw Error(ErrorKind::ParseError, where + ": binary gate needs two wires");
            gate.op = tok[2] == "mul" ? GateOp::Mul : GateOp::Add;
            gate.left = parse_wire(tok[3], lineno);
            gate.right = parse_wire(tok[4], lineno);
        } else if (tok[2] == "cmul") {
            if (tok.size() != 5) throw Error(ErrorKind::ParseError, where + ": cmul needs a constant and a wire");
            gate.op = GateOp::ConstMul;
            gate.constant = parse_int(tok[3], lineno);
            gate.left = parse_wire(tok[4], lineno);
        } else {
            throw Error(ErrorKind::ParseError, where + ": unknown op '" + tok[2] + "'");
        }
        prog.gates.push_back(gate);
    }
    if (!have_inputs) throw Error(ErrorKind::ParseError, "missing inputs header");
    if (!have_output) prog.output = prog.num_wires() - 1;
    check_causal(prog);
    return prog;
}

std::string format_program(const GateProgram& prog) {
    std::ostringstream out;
    out << "inputs " << prog.num_inputs << '\n';
    for (std::size_t g = 0; g < prog.gates.size(); ++g) {
        const Gate& gate = prog.gates[g];
        out << 'w' << (1 + prog.num_inputs + g) << " = ";
        switch (gate.op) {
        case GateOp::Mul: out << "mul w" << gate.left << " w" << gate.right; break;
        case GateOp::Add: out << "add w" << gate.left << " w" << gate.right; break;
        case GateOp::ConstMul: out << "cmul " << gate.constant << " w" << gate.left; break;
        }
        out << '\n';
    }
    out << "output w" << prog.output << '\n';
    return out.str();
}

GateProgram load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open firmware file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_program(buf.str());
}

void write_matrix(ByteWriter& out, const SparseMatrix& m) {
    out.u32(m.dim());
    out.u32(static_cast<std::uint32_t>(m.size()));
    for (const auto& e : m.entries()) {
        out.u32(e.row);
        out.u32(e.col);
        field::write_element(out, e.value);
    }
}

SparseMatrix read_matrix(ByteReader& in, std::uint64_t modulus) {
    const auto dim = in.u32();
    const auto count = in.u32();
    std::vector<Entry> entries;
    for (std::uint32_t i = 0; i < count; ++i) {
        Entry e;
        e.row = in.u32();
        e.col = in.u32();
        e.value = field::read_element(in, modulus);
        if (e.value.is_zero()) throw Error(ErrorKind::EncodingError, "explicit zero entry");
        if (!entries.empty() && std::tie(entries.back().row, entries.back().col) >= std::tie(e.row, e.col))
            throw Error(ErrorKind::EncodingError, "matrix entries not in canonical order");
        entries.push_back(e);
    }
    return SparseMatrix(dim, modulus, std::move(entries));
}

void write_instance(ByteWriter& out, const Instance& inst) {
    out.u64(inst.modulus);
    out.u32(inst.n);
    out.u32(static_cast<std::uint32_t>(inst.public_positions.size()));
    for (auto pos : inst.public_positions) out.u32(pos);
    write_matrix(out, inst.a);
    write_matrix(out, inst.b);
    write_matrix(out, inst.c);
}

Instance read_instance(ByteReader& in) {
    Instance inst{0, 0, {}, SparseMatrix(0, 1), SparseMatrix(0, 1), SparseMatrix(0, 1)};
    inst.modulus = in.u64();
    if (inst.modulus < 2) throw Error(ErrorKind::EncodingError, "bad modulus");
    inst.n = in.u32();
    const auto npub = in.u32();
    for (std::uint32_t i = 0; i < npub; ++i) {
        const auto pos = in.u32();
        if (pos < 1 || pos > inst.n) throw Error(ErrorKind::EncodingError, "public position out of range");
        inst.public_positions.push_back(pos);
    }
    inst.a = read_matrix(in, inst.modulus);
    inst.b = read_matrix(in, inst.modulus);
    inst.c = read_matrix(in, inst.modulus);
    if (inst.a.dim() != inst.n || inst.b.dim() != inst.n || inst.c.dim() != inst.n)
        throw Error(ErrorKind::EncodingError, "matrix dimension mismatch");
    return inst;
}

} // namespace devproof::r1cs
