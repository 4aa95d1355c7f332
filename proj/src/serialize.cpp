#include "chebrec/serialize.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chebrec/errors.hpp"
#include "chebrec/text_format.hpp"

namespace chebrec {

namespace {

/// Whitespace-token reader with line-keyword framing.
class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    std::string next() {
        std::string tok;
        if (!(in_ >> tok)) throw io_error("load_map: unexpected end of file");
        return tok;
    }

    void expect(const std::string& keyword) {
        const std::string tok = next();
        if (tok != keyword)
            throw io_error("load_map: expected '" + keyword + "', found '" + tok + "'");
    }

    double real() { return parse_double(next()); }

    int integer() {
        const long v = parse_long(next());
        return static_cast<int>(v);
    }

    bool at_end() {
        std::string tok;
        return !(in_ >> tok);
    }

private:
    std::istream& in_;
};

}  // namespace

void save_map(const PiecewiseRecoveryMap& map, std::ostream& out) {
    const ChebyshevSystem& system = map.system();
    if (system.kind() == SystemKind::custom)
        throw config_error("save_map: custom bases have no serializable descriptor");
    const int n = map.dimension();

    out << "chebrec-map 1\n";
    out << "basis " << to_string(system.kind()) << ' ' << n << '\n';
    out << "params " << system.parameters().size();
    for (double p : system.parameters()) out << ' ' << fmt17(p);
    out << '\n';
    out << "grid " << map.sample_count() << '\n';
    for (double x : map.grid().points()) out << fmt17(x) << '\n';
    out << "subintervals " << map.subinterval_count() << '\n';
    for (int k = 0; k < map.subinterval_count(); ++k) {
        const SubintervalRecord& rec = map.record(k);
        out << "sub " << (k + 1) << '\n';
        out << "range " << fmt17(rec.left) << ' ' << fmt17(rec.right) << '\n';
        out << "probe " << fmt17(rec.probe) << '\n';
        out << "support";
        for (int s : rec.support) out << ' ' << (s + 1);
        out << '\n';
        out << "lu\n";
        const std::vector<double>& packed = rec.factor.packed();
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                if (c) out << ' ';
                out << fmt17(packed[static_cast<std::size_t>(r) * n + c]);
            }
            out << '\n';
        }
        out << "pivots";
        for (int p : rec.factor.pivot_rows()) out << ' ' << (p + 1);
        out << '\n';
        out << "end\n";
    }
    if (!out) throw io_error("save_map: stream write failed");
}

void save_map(const PiecewiseRecoveryMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("save_map: cannot open '" + path + "' for writing");
    save_map(map, out);
    out.flush();
    if (!out) throw io_error("save_map: write to '" + path + "' failed");
}

PiecewiseRecoveryMap load_map(std::istream& in, const ValidationOptions& validation) {
    TokenReader r(in);
    r.expect("chebrec-map");
    if (r.integer() != 1) throw io_error("load_map: unsupported format version");

    r.expect("basis");
    const SystemKind kind = system_kind_from_string(r.next());
    const int n = r.integer();
    r.expect("params");
    const int nparams = r.integer();
    if (nparams < 0) throw io_error("load_map: negative parameter count");
    std::vector<double> params;
    params.reserve(static_cast<std::size_t>(nparams));
    for (int i = 0; i < nparams; ++i) params.push_back(r.real());

    ChebyshevSystem system = [&] {
        try {
            return make_system(kind, n, std::move(params), validation);
        } catch (const config_error& e) {
            throw io_error(std::string("load_map: bad basis descriptor: ") + e.what());
        }
    }();

    r.expect("grid");
    const int m = r.integer();
    if (m < 1) throw io_error("load_map: empty grid");
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) points.push_back(r.real());
    SamplingGrid grid = [&] {
        try {
            return SamplingGrid(std::move(points));
        } catch (const config_error& e) {
            throw io_error(std::string("load_map: bad grid: ") + e.what());
        }
    }();

    r.expect("subintervals");
    const int count = r.integer();
    if (count != grid.subinterval_count())
        throw io_error("load_map: subinterval count does not match the grid");

    std::vector<SubintervalRecord> records;
    records.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        r.expect("sub");
        if (r.integer() != k + 1) throw io_error("load_map: subinterval records out of order");
        const Subinterval& sub = grid.subinterval(k);
        SubintervalRecord rec;
        rec.left_sample = sub.left_sample;
        rec.right_sample = sub.right_sample;
        r.expect("range");
        rec.left = r.real();
        rec.right = r.real();
        if (rec.left != sub.left || rec.right != sub.right)
            throw io_error("load_map: subinterval range disagrees with the grid");
        r.expect("probe");
        rec.probe = r.real();
        if (!(rec.probe > rec.left && rec.probe < rec.right))
            throw io_error("load_map: probe outside its subinterval");
        r.expect("support");
        rec.support.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int s = r.integer() - 1;
            if (s < 0 || s >= m) throw io_error("load_map: support index out of range");
            if (!rec.support.empty() && s <= rec.support.back())
                throw io_error("load_map: support indices must be strictly increasing");
            rec.support.push_back(s);
        }
        r.expect("lu");
        std::vector<double> packed(static_cast<std::size_t>(n) * n);
        for (auto& v : packed) v = r.real();
        r.expect("pivots");
        std::vector<int> piv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            piv[static_cast<std::size_t>(i)] = r.integer() - 1;
            if (piv[static_cast<std::size_t>(i)] < i || piv[static_cast<std::size_t>(i)] >= n)
                throw io_error("load_map: pivot row out of range");
        }
        rec.factor = LuFactorization::from_packed(n, std::move(packed), std::move(piv));
        r.expect("end");
        records.push_back(std::move(rec));
    }
    if (!r.at_end()) throw io_error("load_map: trailing content after last record");

    try {
        return PiecewiseRecoveryMap(std::move(system), std::move(grid), std::move(records));
    } catch (const config_error& e) {
        throw io_error(std::string("load_map: inconsistent map: ") + e.what());
    }
}

PiecewiseRecoveryMap load_map(const std::string& path, const ValidationOptions& validation) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("load_map: cannot open '" + path + "'");
    return load_map(in, validation);
}

}  // namespace chebrec
