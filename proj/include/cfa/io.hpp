#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cfa/errors.hpp"
#include "cfa/extraction.hpp"
#include "cfa/finite_fn.hpp"
#include "cfa/gliding_hump.hpp"
#include "cfa/grid_function.hpp"
#include "cfa/selection.hpp"

namespace cfa::io {

// All floats are printed with 12 significant digits; round-trips reproduce
// values to that precision, which is finer than the 1e-9 comparison scale
// used everywhere else.
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

class LineReader {
  public:
    explicit LineReader(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines_.push_back(line);
        }
    }

    // Next non-empty, non-comment line as tokens.
    std::vector<std::string> next(const char* what) {
        while (pos_ < lines_.size()) {
            const std::string& line = lines_[pos_++];
            std::string::size_type hash = line.find('#');
            auto toks = tokenize(hash == std::string::npos ? line : line.substr(0, hash));
            if (!toks.empty()) return toks;
        }
        throw ParseError(std::string("unexpected end of input, expected ") + what);
    }

    bool at_end() {
        for (std::size_t p = pos_; p < lines_.size(); ++p) {
            std::string::size_type hash = lines_[p].find('#');
            if (!tokenize(hash == std::string::npos ? lines_[p] : lines_[p].substr(0, hash)).empty()) {
                return false;
            }
        }
        return true;
    }

    std::size_t line_number() const { return pos_; }

  private:
    std::vector<std::string> lines_;
    std::size_t pos_ = 0;
};

inline double parse_double(const std::string& tok) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || tok.empty()) {
        throw ParseError("not a number: '" + tok + "'");
    }
    return v;
}

inline long long parse_int(const std::string& tok) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    long long v = std::strtoll(begin, &end, 10);
    if (end != begin + tok.size() || tok.empty()) {
        throw ParseError("not an integer: '" + tok + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& tok) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    throw ParseError("not a boolean: '" + tok + "'");
}

inline void expect(const std::vector<std::string>& toks, std::size_t count, const char* what) {
    if (toks.size() != count) {
        throw ParseError(std::string("malformed ") + what + " line");
    }
}

inline void expect_keyword(const std::vector<std::string>& toks, const char* kw) {
    if (toks.empty() || toks[0] != kw) {
        throw ParseError(std::string("expected '") + kw + "'" +
                         (toks.empty() ? "" : ", got '" + toks[0] + "'"));
    }
}

} // namespace detail

// ---- grid functions ----------------------------------------------------

inline void emit_grid_function(std::ostream& out, const GridFunction& g) {
    out << "grid\n";
    out << "dim " << g.dim() << "\n";
    out << "origin " << fmt_g(g.origin()[0]) << " " << fmt_g(g.origin()[1]) << "\n";
    out << "spacing " << fmt_g(g.spacing()[0]) << " " << fmt_g(g.spacing()[1]) << "\n";
    out << "extent " << g.extent()[0] << " " << g.extent()[1] << "\n";
    out << "values " << g.values().size() << "\n";
    if (g.dim() == 2) {
        for (int ix = 0; ix < g.extent()[0]; ++ix) {
            for (int iy = 0; iy < g.extent()[1]; ++iy) {
                out << (iy ? " " : "") << fmt_g(g.values()[g.flat_index(ix, iy)]);
            }
            out << "\n";
        }
        return;
    }
    for (std::size_t i = 0; i < g.values().size(); ++i) {
        out << fmt_g(g.values()[i]);
        out << ((i % 8 == 7 || i + 1 == g.values().size()) ? "\n" : " ");
    }
}

inline GridFunction parse_grid_function(std::istream& in) {
    detail::LineReader r(in);
    detail::expect_keyword(r.next("'grid' header"), "grid");
    auto dim_toks = r.next("dim");
    detail::expect_keyword(dim_toks, "dim");
    detail::expect(dim_toks, 2, "dim");
    int dim = static_cast<int>(detail::parse_int(dim_toks[1]));
    auto origin_toks = r.next("origin");
    detail::expect_keyword(origin_toks, "origin");
    detail::expect(origin_toks, 3, "origin");
    std::array<double, 2> origin{detail::parse_double(origin_toks[1]),
                                 detail::parse_double(origin_toks[2])};
    auto spacing_toks = r.next("spacing");
    detail::expect_keyword(spacing_toks, "spacing");
    detail::expect(spacing_toks, 3, "spacing");
    std::array<double, 2> spacing{detail::parse_double(spacing_toks[1]),
                                  detail::parse_double(spacing_toks[2])};
    auto extent_toks = r.next("extent");
    detail::expect_keyword(extent_toks, "extent");
    detail::expect(extent_toks, 3, "extent");
    std::array<int, 2> extent{static_cast<int>(detail::parse_int(extent_toks[1])),
                              static_cast<int>(detail::parse_int(extent_toks[2]))};
    auto values_toks = r.next("values");
    detail::expect_keyword(values_toks, "values");
    detail::expect(values_toks, 2, "values");
    long long count = detail::parse_int(values_toks[1]);
    if (count < 1) throw ParseError("value count must be positive");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    while (static_cast<long long>(values.size()) < count) {
        for (const auto& tok : r.next("grid values")) {
            values.push_back(detail::parse_double(tok));
        }
    }
    if (static_cast<long long>(values.size()) != count || !r.at_end()) {
        throw ParseError("trailing data after grid values");
    }
    try {
        return GridFunction(dim, origin, spacing, extent, std::move(values));
    } catch (const Error& e) {
        throw ParseError(std::string("invalid grid record: ") + e.what());
    }
}

// ---- finite functions ----------------------------------------------------

inline void emit_finite_fn(std::ostream& out, const FiniteFn& f) {
    for (const auto& label : f.labels()) {
        for (char c : label) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                throw InvalidInputError("label '" + label + "' contains whitespace");
            }
        }
    }
    out << "finite-fn\n";
    out << "size " << f.size() << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << f.labels()[i] << " " << fmt_g(f.values()[i]) << "\n";
    }
}

inline FiniteFn parse_finite_fn(std::istream& in) {
    detail::LineReader r(in);
    detail::expect_keyword(r.next("'finite-fn' header"), "finite-fn");
    auto size_toks = r.next("size");
    detail::expect_keyword(size_toks, "size");
    detail::expect(size_toks, 2, "size");
    long long count = detail::parse_int(size_toks[1]);
    if (count < 1) throw ParseError("finite function must have at least one label");
    std::vector<std::string> labels;
    std::vector<double> values;
    for (long long i = 0; i < count; ++i) {
        auto toks = r.next("label/value pair");
        detail::expect(toks, 2, "label/value pair");
        labels.push_back(toks[0]);
        values.push_back(detail::parse_double(toks[1]));
    }
    if (!r.at_end()) throw ParseError("trailing data after finite function values");
    try {
        return FiniteFn(std::move(labels), std::move(values));
    } catch (const Error& e) {
        throw ParseError(std::string("invalid finite function record: ") + e.what());
    }
}

// ---- certificate tables ----------------------------------------------------

inline void emit_certificate_csv(std::ostream& out, const CertificateTable& table) {
    out << "n,observed,required,pass\n";
    for (const auto& row : table) {
        out << row.n << "," << fmt_g(row.observed) << "," << fmt_g(row.required) << ","
            << (row.pass ? "true" : "false") << "\n";
    }
}

inline CertificateTable parse_certificate_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty certificate file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "n,observed,required,pass") {
        throw ParseError("bad certificate header: '" + line + "'");
    }
    CertificateTable table;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string::size_type start = 0;
        while (true) {
            auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 4) throw ParseError("bad certificate row: '" + line + "'");
        CertificateRow row;
        row.n = static_cast<int>(detail::parse_int(cells[0]));
        row.observed = detail::parse_double(cells[1]);
        row.required = detail::parse_double(cells[2]);
        row.pass = detail::parse_bool(cells[3]);
        table.push_back(row);
    }
    return table;
}

inline void emit_certificate_text(std::ostream& out, const CertificateTable& table) {
    out << "certificate-table\n";
    out << "rows " << table.size() << "\n";
    for (const auto& row : table) {
        out << row.n << " " << fmt_g(row.observed) << " " << fmt_g(row.required) << " "
            << (row.pass ? "true" : "false") << "\n";
    }
}

inline CertificateTable parse_certificate_text(std::istream& in) {
    detail::LineReader r(in);
    detail::expect_keyword(r.next("'certificate-table' header"), "certificate-table");
    auto rows_toks = r.next("rows");
    detail::expect_keyword(rows_toks, "rows");
    detail::expect(rows_toks, 2, "rows");
    long long count = detail::parse_int(rows_toks[1]);
    CertificateTable table;
    for (long long i = 0; i < count; ++i) {
        auto toks = r.next("certificate row");
        detail::expect(toks, 4, "certificate row");
        CertificateRow row;
        row.n = static_cast<int>(detail::parse_int(toks[0]));
        row.observed = detail::parse_double(toks[1]);
        row.required = detail::parse_double(toks[2]);
        row.pass = detail::parse_bool(toks[3]);
        table.push_back(row);
    }
    if (!r.at_end()) throw ParseError("trailing data after certificate rows");
    return table;
}

// ---- selection reports ----------------------------------------------------

inline void emit_selection_report(std::ostream& out, const SelectionReport& rep) {
    out << "selection-report\n";
    out << "bound-constant " << (rep.bound_constant ? fmt_g(*rep.bound_constant) : "none") << "\n";
    out << "lambda-table " << rep.lambda_table.size() << "\n";
    for (const auto& [n, v] : rep.lambda_table) {
        out << n << " " << fmt_g(v) << "\n";
    }
    out << "indices " << rep.indices.size() << "\n";
    for (std::size_t i = 0; i < rep.indices.size(); ++i) {
        out << (i ? " " : "") << rep.indices[i];
    }
    if (!rep.indices.empty()) out << "\n";
    out << "subsets " << rep.subsets.size() << "\n";
    for (const auto& [n, labels] : rep.subsets) {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        out << n << " " << sorted.size();
        for (const auto& label : sorted) out << " " << label;
        out << "\n";
    }
}

inline SelectionReport parse_selection_report(std::istream& in) {
    detail::LineReader r(in);
    detail::expect_keyword(r.next("'selection-report' header"), "selection-report");
    SelectionReport rep;
    auto bc = r.next("bound-constant");
    detail::expect_keyword(bc, "bound-constant");
    detail::expect(bc, 2, "bound-constant");
    if (bc[1] != "none") rep.bound_constant = detail::parse_double(bc[1]);
    auto lt = r.next("lambda-table");
    detail::expect_keyword(lt, "lambda-table");
    detail::expect(lt, 2, "lambda-table");
    long long lcount = detail::parse_int(lt[1]);
    for (long long i = 0; i < lcount; ++i) {
        auto toks = r.next("lambda entry");
        detail::expect(toks, 2, "lambda entry");
        rep.lambda_table[static_cast<int>(detail::parse_int(toks[0]))] =
            detail::parse_double(toks[1]);
    }
    auto ix = r.next("indices");
    detail::expect_keyword(ix, "indices");
    detail::expect(ix, 2, "indices");
    long long icount = detail::parse_int(ix[1]);
    if (icount > 0) {
        auto toks = r.next("index list");
        detail::expect(toks, static_cast<std::size_t>(icount), "index list");
        for (const auto& tok : toks) rep.indices.push_back(static_cast<int>(detail::parse_int(tok)));
    }
    auto sb = r.next("subsets");
    detail::expect_keyword(sb, "subsets");
    detail::expect(sb, 2, "subsets");
    long long scount = detail::parse_int(sb[1]);
    for (long long i = 0; i < scount; ++i) {
        auto toks = r.next("subset entry");
        if (toks.size() < 2) throw ParseError("malformed subset entry");
        int n = static_cast<int>(detail::parse_int(toks[0]));
        long long k = detail::parse_int(toks[1]);
        if (static_cast<long long>(toks.size()) != 2 + k) {
            throw ParseError("subset entry length mismatch");
        }
        rep.subsets[n] = std::vector<std::string>(toks.begin() + 2, toks.end());
    }
    if (!r.at_end()) throw ParseError("trailing data after subsets");
    return rep;
}

// ---- extraction results ----------------------------------------------------

inline void emit_extraction_result(std::ostream& out, const ExtractionResult& res) {
    out << "extraction-result\n";
    out << "norm " << res.norm_label << "\n";
    out << "modulus-estimated " << (res.modulus_estimated ? "true" : "false") << "\n";
    out << "epsilons " << res.epsilons.size() << "\n";
    for (std::size_t i = 0; i < res.epsilons.size(); ++i) {
        out << (i ? " " : "") << fmt_g(res.epsilons[i]);
    }
    if (!res.epsilons.empty()) out << "\n";
    out << "stages " << res.stages.size() << "\n";
    for (std::size_t s = 0; s < res.stages.size(); ++s) {
        out << "stage " << s << " " << res.stages[s].size();
        for (int idx : res.stages[s]) out << " " << idx;
        out << "\n";
    }
    out << "diagonal " << res.subsequence.size();
    for (int idx : res.subsequence) out << " " << idx;
    out << "\n";
    out << "cauchy " << res.cauchy.size() << "\n";
    for (const auto& e : res.cauchy) {
        out << e.i << " " << e.j << " " << fmt_g(e.distance) << "\n";
    }
    out << "modulus " << res.modulus.size() << "\n";
    for (const auto& [eps, pos] : res.modulus) {
        out << fmt_g(eps) << " " << pos << "\n";
    }
}

inline ExtractionResult parse_extraction_result(std::istream& in) {
    detail::LineReader r(in);
    detail::expect_keyword(r.next("'extraction-result' header"), "extraction-result");
    ExtractionResult res;
    auto norm_toks = r.next("norm");
    detail::expect_keyword(norm_toks, "norm");
    detail::expect(norm_toks, 2, "norm");
    res.norm_label = norm_toks[1];
    auto est = r.next("modulus-estimated");
    detail::expect_keyword(est, "modulus-estimated");
    detail::expect(est, 2, "modulus-estimated");
    res.modulus_estimated = detail::parse_bool(est[1]);
    auto eps_toks = r.next("epsilons");
    detail::expect_keyword(eps_toks, "epsilons");
    detail::expect(eps_toks, 2, "epsilons");
    long long ecount = detail::parse_int(eps_toks[1]);
    if (ecount > 0) {
        auto toks = r.next("epsilon list");
        detail::expect(toks, static_cast<std::size_t>(ecount), "epsilon list");
        for (const auto& tok : toks) res.epsilons.push_back(detail::parse_double(tok));
    }
    auto st = r.next("stages");
    detail::expect_keyword(st, "stages");
    detail::expect(st, 2, "stages");
    long long scount = detail::parse_int(st[1]);
    for (long long s = 0; s < scount; ++s) {
        auto toks = r.next("stage");
        detail::expect_keyword(toks, "stage");
        if (toks.size() < 3) throw ParseError("malformed stage line");
        if (detail::parse_int(toks[1]) != s) throw ParseError("stage indices out of order");
        long long size = detail::parse_int(toks[2]);
        if (static_cast<long long>(toks.size()) != 3 + size) {
            throw ParseError("stage length mismatch");
        }
        std::vector<int> stage;
        for (long long i = 0; i < size; ++i) {
            stage.push_back(static_cast<int>(detail::parse_int(toks[static_cast<std::size_t>(3 + i)])));
        }
        res.stages.push_back(std::move(stage));
    }
    auto dg = r.next("diagonal");
    detail::expect_keyword(dg, "diagonal");
    if (dg.size() < 2) throw ParseError("malformed diagonal line");
    long long dsize = detail::parse_int(dg[1]);
    if (static_cast<long long>(dg.size()) != 2 + dsize) throw ParseError("diagonal length mismatch");
    for (long long i = 0; i < dsize; ++i) {
        res.subsequence.push_back(static_cast<int>(detail::parse_int(dg[static_cast<std::size_t>(2 + i)])));
    }
    auto cy = r.next("cauchy");
    detail::expect_keyword(cy, "cauchy");
    detail::expect(cy, 2, "cauchy");
    long long ccount = detail::parse_int(cy[1]);
    for (long long i = 0; i < ccount; ++i) {
        auto toks = r.next("cauchy entry");
        detail::expect(toks, 3, "cauchy entry");
        CauchyEntry e;
        e.i = static_cast<int>(detail::parse_int(toks[0]));
        e.j = static_cast<int>(detail::parse_int(toks[1]));
        e.distance = detail::parse_double(toks[2]);
        res.cauchy.push_back(e);
    }
    auto md = r.next("modulus");
    detail::expect_keyword(md, "modulus");
    detail::expect(md, 2, "modulus");
    long long mcount = detail::parse_int(md[1]);
    for (long long i = 0; i < mcount; ++i) {
        auto toks = r.next("modulus entry");
        detail::expect(toks, 2, "modulus entry");
        res.modulus.emplace_back(detail::parse_double(toks[0]),
                                 static_cast<int>(detail::parse_int(toks[1])));
    }
    if (!r.at_end()) throw ParseError("trailing data after modulus table");
    return res;
}

// ---- file helpers ----------------------------------------------------

template <typename Emit>
inline void write_text_file(const std::filesystem::path& path, Emit&& emit) {
    std::ofstream out(path, std::ios::binary); // fixed newline bytes on every platform
    if (!out) throw IoError("cannot open for writing: " + path.string());
    emit(out);
    out.flush();
    if (!out.good()) throw IoError("write failed: " + path.string());
}

template <typename Parse>
inline auto read_text_file(const std::filesystem::path& path, Parse&& parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return parse(in);
}

inline GridFunction read_grid_function(const std::filesystem::path& path) {
    return read_text_file(path, [](std::istream& in) { return parse_grid_function(in); });
}

inline FiniteFn read_finite_fn(const std::filesystem::path& path) {
    return read_text_file(path, [](std::istream& in) { return parse_finite_fn(in); });
}

} // namespace cfa::io
