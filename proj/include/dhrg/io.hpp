#pragma once

// Plain-text formats. Blank lines and '#' comments are ignored on input;
// malformed input raises ParseError naming the line.
//
//   graph                "u v" per edge, 0-based ids
//   continuous embedding header "n R T alpha", then "v r phi"
//   discrete embedding   header "n R T alpha tiling", then "v address"
//   histograms           "d pairs edges"
//   search history       "iteration objective accepted_moves"
//   routing report       "attempts successes rate mean_hops mean_stretch"
//   calibration report   "d ring_size mean_dist variance"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "convert.hpp"
#include "likelihood.hpp"
#include "local_search.hpp"
#include "model.hpp"
#include "routing.hpp"
#include "tessellation.hpp"

namespace dhrg {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

/// Splits significant lines into whitespace-separated fields.
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    bool next(std::vector<std::string_view>& fields) {
        while (std::getline(in_, line_)) {
            ++lineno_;
            if (auto hash = line_.find('#'); hash != std::string::npos) line_.resize(hash);
            fields.clear();
            std::string_view rest(line_);
            while (true) {
                const auto b = rest.find_first_not_of(" \t\r");
                if (b == std::string_view::npos) break;
                rest.remove_prefix(b);
                const auto e = rest.find_first_of(" \t\r");
                fields.push_back(rest.substr(0, e));
                if (e == std::string_view::npos) break;
                rest.remove_prefix(e);
            }
            if (!fields.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, lineno_, what); }

    void expect_fields(const std::vector<std::string_view>& f, std::size_t n, const char* layout) const {
        if (f.size() != n) fail("expected " + std::to_string(n) + " fields (" + layout + "), got " + std::to_string(f.size()));
    }

    template <class T>
    T number(std::string_view s, const char* what) const {
        T value{};
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size()) fail(std::string("invalid ") + what + " '" + std::string(s) + "'");
        return value;
    }

    std::size_t line() const { return lineno_; }
    const std::string& source() const { return source_; }

private:
    std::istream& in_;
    std::string source_;
    std::string line_;
    std::size_t lineno_ = 0;
};

inline std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);  // shortest exact representation
    return std::string(buf, r.ptr);
}

inline ModelParams read_params(LineReader& r, const std::vector<std::string_view>& f) {
    ModelParams p;
    p.n = r.number<std::size_t>(f[0], "vertex count");
    p.R = r.number<double>(f[1], "R");
    p.T = r.number<double>(f[2], "T");
    p.alpha = r.number<double>(f[3], "alpha");
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    return p;
}

inline void write_params(std::ostream& out, const ModelParams& p) {
    out << p.n << ' ' << format_double(p.R) << ' ' << format_double(p.T) << ' ' << format_double(p.alpha);
}

}  // namespace detail

/// Reads an edge list. The vertex count is `n` when given (ids must fit),
/// otherwise one more than the largest id.
inline Graph read_graph(std::istream& in, std::optional<std::size_t> n = std::nullopt, const std::string& source = "graph") {
    detail::LineReader r(in, source);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::size_t top = 0;
    std::vector<std::string_view> f;
    while (r.next(f)) {
        r.expect_fields(f, 2, "u v");
        const auto u = r.number<std::uint32_t>(f[0], "vertex id");
        const auto v = r.number<std::uint32_t>(f[1], "vertex id");
        if (n && (u >= *n || v >= *n))
            r.fail("vertex id " + std::to_string(std::max(u, v)) + " out of range for " + std::to_string(*n) + " vertices");
        top = std::max<std::size_t>(top, std::max(u, v) + std::size_t{1});
        edges.emplace_back(u, v);
    }
    Graph g(n.value_or(top));
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
}

inline void write_graph(std::ostream& out, const Graph& g) {
    out << "# " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline ContinuousEmbedding read_continuous(std::istream& in, const std::string& source = "embedding") {
    detail::LineReader r(in, source);
    std::vector<std::string_view> f;
    if (!r.next(f)) r.fail("missing header 'n R T alpha'");
    r.expect_fields(f, 4, "n R T alpha");
    ContinuousEmbedding ce{detail::read_params(r, f), {}};
    ce.coords.resize(ce.params.n);
    std::vector<bool> seen(ce.params.n, false);
    std::size_t count = 0;
    while (r.next(f)) {
        r.expect_fields(f, 3, "v r phi");
        const auto v = r.number<std::size_t>(f[0], "vertex id");
        if (v >= ce.params.n) r.fail("vertex id " + std::to_string(v) + " out of range");
        if (seen[v]) r.fail("vertex " + std::to_string(v) + " listed twice");
        seen[v] = true;
        ++count;
        ce.coords[v] = {r.number<double>(f[1], "radius"), r.number<double>(f[2], "angle")};
        if (!(ce.coords[v].r >= 0)) r.fail("negative radius");
    }
    if (count != ce.params.n)
        r.fail("header announces " + std::to_string(ce.params.n) + " vertices, found " + std::to_string(count));
    return ce;
}

inline void write_continuous(std::ostream& out, const ContinuousEmbedding& ce) {
    detail::write_params(out, ce.params);
    out << '\n';
    for (std::size_t v = 0; v < ce.coords.size(); ++v)
        out << v << ' ' << detail::format_double(ce.coords[v].r) << ' ' << detail::format_double(ce.coords[v].phi) << '\n';
}

/// Reads a discrete embedding. A tessellation is created for the file's
/// tiling unless one with the same rules is supplied.
inline DiscreteEmbedding read_discrete(std::istream& in, std::shared_ptr<Tessellation> tes = nullptr,
                                       const std::string& source = "embedding") {
    detail::LineReader r(in, source);
    std::vector<std::string_view> f;
    if (!r.next(f)) r.fail("missing header 'n R T alpha tiling'");
    r.expect_fields(f, 5, "n R T alpha tiling");
    DiscreteEmbedding de;
    de.params = detail::read_params(r, f);
    TilingRules rules;
    try {
        rules = TilingRules::from_name(f[4]);
        (void)de.params.radius();
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    if (tes && tes->rules().name != rules.name)
        r.fail("embedding uses tiling " + rules.name + " but " + tes->rules().name + " was requested");
    de.tessellation = tes ? std::move(tes) : std::make_shared<Tessellation>(rules);
    de.tiles.assign(de.params.n, nullptr);
    std::size_t count = 0;
    while (r.next(f)) {
        if (f.size() == 1) f.emplace_back();  // the root's address is empty
        r.expect_fields(f, 2, "v address");
        const auto v = r.number<std::size_t>(f[0], "vertex id");
        if (v >= de.params.n) r.fail("vertex id " + std::to_string(v) + " out of range");
        if (de.tiles[v]) r.fail("vertex " + std::to_string(v) + " listed twice");
        try {
            de.tiles[v] = de.tessellation->resolve_address(address_from_string(f[1]));
        } catch (const std::exception& e) {
            r.fail(e.what());
        }
        if (de.tiles[v]->layer > de.radius())
            r.fail("tile " + std::string(f[1]) + " lies outside the radius-" + std::to_string(de.radius()) + " ball");
        ++count;
    }
    if (count != de.params.n)
        r.fail("header announces " + std::to_string(de.params.n) + " vertices, found " + std::to_string(count));
    return de;
}

inline void write_discrete(std::ostream& out, const DiscreteEmbedding& de) {
    detail::write_params(out, de.params);
    out << ' ' << de.tessellation->rules().name << '\n';
    for (std::size_t v = 0; v < de.tiles.size(); ++v)
        out << v << ' ' << address_to_string(de.tessellation->encode_address(de.tiles[v])) << '\n';
}

inline void write_histograms(std::ostream& out, const DistanceHistograms& h) {
    for (std::size_t d = 0; d < h.size(); ++d) out << d << ' ' << h.pair_at(d) << ' ' << h.edge_at(d) << '\n';
}

inline DistanceHistograms read_histograms(std::istream& in, const std::string& source = "histograms") {
    detail::LineReader r(in, source);
    DistanceHistograms h;
    std::vector<std::string_view> f;
    while (r.next(f)) {
        r.expect_fields(f, 3, "d pairs edges");
        const auto d = r.number<std::size_t>(f[0], "distance");
        const auto p = r.number<std::int64_t>(f[1], "pair count");
        const auto e = r.number<std::int64_t>(f[2], "edge count");
        if (e < 0 || e > p) r.fail("edge count outside [0, pairs]");
        if (h.size() <= d) h.resize(d + 1);
        h.pairs[d] += p;
        h.edges[d] += e;
    }
    return h;
}

inline void write_history(std::ostream& out, const std::vector<IterationRecord>& history) {
    for (const auto& rec : history)
        out << rec.iteration << ' ' << detail::format_double(rec.objective) << ' ' << rec.accepted_moves << '\n';
}

inline void write_routing_report(std::ostream& out, const RoutingReport& r) {
    out << r.attempts << ' ' << r.successes << ' ' << detail::format_double(r.success_rate) << ' '
        << detail::format_double(r.mean_hops) << ' ' << detail::format_double(r.mean_stretch) << '\n';
}

inline void write_calibration(std::ostream& out, const Calibration& cal) {
    for (const auto& L : cal.layers)
        out << L.d << ' ' << L.ring_size << ' ' << detail::format_double(L.mean) << ' ' << detail::format_double(L.variance)
            << '\n';
}

template <class T, class Reader>
T read_file(const std::string& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    return reader(in, path);
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace dhrg
