#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cfa/errors.hpp"
#include "cfa/extraction.hpp"
#include "cfa/gliding_hump.hpp"
#include "cfa/io.hpp"
#include "cfa/operator_family.hpp"
#include "cfa/selection.hpp"

namespace cfa {

// A scenario is one structured text file of "key: value" lines ('#' starts a
// comment). The kind picks the experiment; everything else configures it.
// No environment variables are consulted: the file alone determines the run.
struct Scenario {
    std::string kind;
    std::map<std::string, std::string> fields;
    std::filesystem::path dir; // referenced files resolve against this
};

enum class OutputFormat { Csv, Text };

struct RunOutcome {
    int status = 0;
    std::vector<std::filesystem::path> artifacts;
    std::string diagnostic;
};

inline const std::vector<std::pair<std::string, std::string>>& scenario_kinds() {
    static const std::vector<std::pair<std::string, std::string>> kinds = {
        {"ubp-witness", "gliding-hump divergence certificate for one operator family"},
        {"weak-ubp", "divergence certificate with averaged near-maximizer sets"},
        {"aa-extract", "equicontinuity-based subsequence extraction, sup-norm certificate"},
        {"fk-extract", "smoothing-based subsequence extraction, L^p certificate"},
        {"choose-finite", "finite choice through dyadic shell selection"},
        {"choose-asymptotic", "scaled choice with a level-set cardinality certificate"},
        {"choose-singleton", "iterated refinement of finite sets to single labels"},
    };
    return kinds;
}

inline int exit_code_for_error(const std::exception& e) {
    if (dynamic_cast<const CertificateError*>(&e)) return 4;
    if (dynamic_cast<const EmptySelectionError*>(&e)) return 3;
    return 2;
}

inline Scenario parse_scenario(std::istream& in, const std::filesystem::path& dir) {
    Scenario s;
    s.dir = dir;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError("line " + std::to_string(lineno) + ": expected 'key: value'");
        }
        auto strip = [](std::string v) {
            auto b = v.find_first_not_of(" \t");
            auto e = v.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        std::string key = strip(line.substr(0, colon));
        std::string value = strip(line.substr(colon + 1));
        if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
        if (s.fields.count(key)) {
            throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        s.fields[key] = value;
    }
    auto kind_it = s.fields.find("kind");
    if (kind_it == s.fields.end()) throw ParseError("scenario has no 'kind' field");
    s.kind = kind_it->second;
    s.fields.erase(kind_it);
    bool known = false;
    for (const auto& [k, d] : scenario_kinds()) known = known || k == s.kind;
    if (!known) {
        std::string msg = "unknown kind '" + s.kind + "'; expected one of:";
        for (const auto& [k, d] : scenario_kinds()) msg += " " + k;
        throw ParseError(msg);
    }
    return s;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file: " + path.string());
    return parse_scenario(in, path.parent_path());
}

namespace detail {

inline std::vector<std::string> field_tokens(const std::string& value) {
    return io::detail::tokenize(value);
}

inline const std::string& require_field(const Scenario& s, const std::string& key) {
    auto it = s.fields.find(key);
    if (it == s.fields.end()) {
        throw ParseError("scenario kind '" + s.kind + "' requires field '" + key + "'");
    }
    return it->second;
}

inline std::string optional_field(const Scenario& s, const std::string& key,
                                  const std::string& fallback) {
    auto it = s.fields.find(key);
    return it == s.fields.end() ? fallback : it->second;
}

inline void reject_unknown_fields(const Scenario& s, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : s.fields) {
        if (!allowed.count(key)) {
            throw ParseError("field '" + key + "' is not valid for kind '" + s.kind + "'");
        }
    }
}

inline long long int_field(const Scenario& s, const std::string& key, long long lo,
                           long long hi) {
    long long v = io::detail::parse_int(require_field(s, key));
    if (v < lo || v > hi) {
        throw ParseError("field '" + key + "' must lie in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    }
    return v;
}

inline std::vector<double> double_list(const std::string& value, const std::string& what) {
    auto toks = field_tokens(value);
    if (toks.empty()) throw ParseError(what + " list is empty");
    std::vector<double> out;
    for (const auto& t : toks) out.push_back(io::detail::parse_double(t));
    return out;
}

// Label groups: "repeat a b c" (one group reused everywhere) or
// "groups a b | c d | ...".
inline std::vector<std::vector<std::string>> parse_spaces(const std::string& value, int count) {
    auto toks = field_tokens(value);
    if (toks.empty()) throw ParseError("empty spaces field");
    if (toks[0] == "repeat") {
        std::vector<std::string> group(toks.begin() + 1, toks.end());
        if (group.empty()) throw ParseError("'repeat' needs at least one label");
        return std::vector<std::vector<std::string>>(static_cast<std::size_t>(count), group);
    }
    if (toks[0] != "groups") {
        throw ParseError("spaces must start with 'repeat' or 'groups'");
    }
    std::vector<std::vector<std::string>> groups;
    std::vector<std::string> cur;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i] == "|") {
            if (cur.empty()) throw ParseError("empty label group");
            groups.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(toks[i]);
        }
    }
    if (cur.empty()) throw ParseError("empty label group");
    groups.push_back(std::move(cur));
    if (static_cast<int>(groups.size()) < count) {
        throw ParseError("need at least " + std::to_string(count) + " label groups, got " +
                         std::to_string(groups.size()));
    }
    return groups;
}

inline std::string min_label(const std::vector<std::string>& labels) {
    return *std::min_element(labels.begin(), labels.end());
}

struct UbpSetup {
    HumpInput input;
    int horizon = 1;
};

inline UbpSetup build_ubp(const Scenario& s) {
    reject_unknown_fields(s, {"family", "scale", "spaces", "horizon", "witness",
                              "operator-shift", "out"});
    int horizon = static_cast<int>(int_field(s, "horizon", 1, 64));
    int shift = static_cast<int>(io::detail::parse_int(optional_field(s, "operator-shift", "0")));
    if (shift < 0) throw ParseError("operator-shift must be nonnegative");
    int depth = horizon + shift;

    std::string variant = require_field(s, "family");
    std::string scale = optional_field(s, "scale", variant == "scaling" ? "" : "4^n");
    std::string witness_kind = optional_field(s, "witness", "min-indicator");
    if (witness_kind != "min-indicator") {
        throw ParseError("unknown witness recipe '" + witness_kind + "'");
    }

    std::vector<std::vector<std::string>> spaces;
    if (variant == "diagonal") {
        if (s.fields.count("spaces")) {
            throw ParseError("the diagonal family generates its own spaces");
        }
        for (int n = 1; n <= depth; ++n) spaces.push_back({std::to_string(n)});
    } else {
        spaces = parse_spaces(require_field(s, "spaces"), depth);
    }

    OperatorFamily family = [&]() {
        if (variant == "integration" || variant == "diagonal") {
            if (scale != "4^n") throw ParseError("this family uses the fixed scale '4^n'");
            return OperatorFamily::integration(spaces);
        }
        if (variant == "quotient") {
            if (scale != "4^n") throw ParseError("this family uses the fixed scale '4^n'");
            return OperatorFamily::quotient(spaces);
        }
        if (variant == "scaling") {
            auto toks = field_tokens(scale);
            if (toks.size() < 2 || toks[0] != "lambda") {
                throw ParseError("a scaling family needs 'scale: lambda <values...>'");
            }
            std::vector<double> lambdas;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                lambdas.push_back(io::detail::parse_double(toks[i]));
            }
            if (static_cast<int>(lambdas.size()) < depth) {
                throw ParseError("lambda list shorter than horizon plus shift");
            }
            return OperatorFamily::scaling(lambdas, spaces);
        }
        throw ParseError("unknown family '" + variant + "'");
    }();

    std::function<DirectSumVec(int)> witness = [family, shift](int n) {
        int alpha = n + shift;
        DirectSumVec x = family.zero_vector();
        const auto& labels = family.space(alpha);
        x.set_component(alpha, FiniteFn::indicator(labels, min_label(labels)));
        return x;
    };
    std::function<int(int)> index;
    if (shift > 0) index = [shift](int n) { return n + shift; };
    return UbpSetup{HumpInput{std::move(family), horizon, std::move(witness), std::move(index)},
                    horizon};
}

inline UbpSetup build_weak_ubp(const Scenario& s) {
    reject_unknown_fields(s, {"spaces", "horizon", "set-size", "out"});
    int horizon = static_cast<int>(int_field(s, "horizon", 1, 64));
    int set_size = static_cast<int>(int_field(s, "set-size", 1, 64));
    auto spaces = parse_spaces(require_field(s, "spaces"), horizon);
    OperatorFamily family = OperatorFamily::integration(spaces);

    // Near-maximizer sets: k scaled copies of the minimal indicator, with
    // factors 1 - j/(3k) > 2/3, averaged through the mean construction.
    std::function<DirectSumVec(int)> witness = [family, set_size](int n) {
        const auto& labels = family.space(n);
        FiniteFn base = FiniteFn::indicator(labels, min_label(labels));
        std::vector<DirectSumVec> set;
        for (int j = 0; j < set_size; ++j) {
            double factor = 1.0 - static_cast<double>(j) / (3.0 * set_size);
            DirectSumVec x = family.zero_vector();
            x.set_component(n, factor * base);
            set.push_back(std::move(x));
        }
        return average_near_maximizer(set, n, family);
    };
    return UbpSetup{HumpInput{std::move(family), horizon, std::move(witness), {}}, horizon};
}

struct GridFamilySetup {
    std::vector<GridFunction> family;
    int dense_levels = 0;
};

inline GridFunction sampled_1d(double lo, double hi, int cells,
                               const std::function<double(double)>& f) {
    double h = (hi - lo) / cells;
    std::vector<double> values(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) {
        values[static_cast<std::size_t>(i)] = f(lo + (i + 0.5) * h);
    }
    return GridFunction(1, {lo, 0.0}, {h, 1.0}, {cells, 1}, std::move(values));
}

inline std::pair<double, double> parse_interval(const Scenario& s) {
    auto box = double_list(require_field(s, "box"), "box");
    if (box.size() != 2 || !(box[0] < box[1])) {
        throw ParseError("box must be two numbers lo < hi");
    }
    return {box[0], box[1]};
}

inline std::vector<GridFunction> family_from_files(const Scenario& s,
                                                   const std::vector<std::string>& toks) {
    std::vector<GridFunction> family;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        std::filesystem::path p = s.dir / toks[i];
        if (!std::filesystem::exists(p)) {
            throw ParseError("referenced file does not exist: " + p.string());
        }
        family.push_back(io::read_grid_function(p));
    }
    if (family.empty()) throw ParseError("'files' needs at least one path");
    return family;
}

inline GridFamilySetup build_aa_family(const Scenario& s) {
    reject_unknown_fields(s, {"family", "box", "nodes", "phases", "count", "dense-levels",
                              "eps", "out"});
    GridFamilySetup setup;
    auto toks = field_tokens(require_field(s, "family"));
    if (toks.empty()) throw ParseError("empty family field");
    if (toks[0] == "files") {
        setup.family = family_from_files(s, toks);
    } else if (toks[0] == "sine-phases") {
        auto [lo, hi] = parse_interval(s);
        int nodes = static_cast<int>(int_field(s, "nodes", 2, 1 << 20));
        int count = static_cast<int>(int_field(s, "count", 1, 4096));
        auto phases = double_list(require_field(s, "phases"), "phases");
        for (int k = 0; k < count; ++k) {
            double phase = phases[static_cast<std::size_t>(k) % phases.size()];
            setup.family.push_back(
                sampled_1d(lo, hi, nodes, [phase](double x) { return std::sin(x + phase); }));
        }
    } else {
        throw ParseError("unknown family recipe '" + toks[0] + "'");
    }
    int fallback = setup.family.front().dim() == 1 ? 12 : 6;
    setup.dense_levels = static_cast<int>(
        io::detail::parse_int(optional_field(s, "dense-levels", std::to_string(fallback))));
    if (setup.dense_levels < 0 || setup.dense_levels > 24) {
        throw ParseError("dense-levels out of range");
    }
    return setup;
}

inline std::vector<double> parse_eps_schedule(const Scenario& s) {
    auto eps = double_list(require_field(s, "eps"), "eps");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ParseError("eps values must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1])) {
            throw ParseError("eps schedule must be strictly decreasing");
        }
    }
    return eps;
}

inline GridFamilySetup build_fk_family(const Scenario& s) {
    reject_unknown_fields(s, {"family", "box", "spacing-denom", "offsets", "width", "count",
                              "center", "bump-width", "p", "mollifiers", "eps", "dense-levels",
                              "out"});
    GridFamilySetup setup;
    auto toks = field_tokens(require_field(s, "family"));
    if (toks.empty()) throw ParseError("empty family field");
    if (toks[0] == "files") {
        setup.family = family_from_files(s, toks);
    } else {
        auto [lo, hi] = parse_interval(s);
        int denom = static_cast<int>(int_field(s, "spacing-denom", 1, 1 << 20));
        double cells_exact = (hi - lo) * denom;
        int cells = static_cast<int>(std::llround(cells_exact));
        if (std::fabs(cells_exact - cells) > 1e-6 || cells < 1) {
            throw ParseError("box length must be a whole number of cells");
        }
        int count = static_cast<int>(int_field(s, "count", 1, 4096));
        if (toks[0] == "translate-indicator") {
            auto offsets = double_list(require_field(s, "offsets"), "offsets");
            double width = io::detail::parse_double(optional_field(s, "width", "0.5"));
            if (!(width > 0.0)) throw ParseError("indicator width must be positive");
            for (int k = 0; k < count; ++k) {
                double a = offsets[static_cast<std::size_t>(k) % offsets.size()];
                setup.family.push_back(sampled_1d(lo, hi, cells, [a, width](double x) {
                    return (x >= a && x < a + width) ? 1.0 : 0.0;
                }));
            }
        } else if (toks[0] == "smooth-translate") {
            double c = io::detail::parse_double(optional_field(s, "center", "1"));
            double w = io::detail::parse_double(optional_field(s, "bump-width", "0.75"));
            if (!(w > 0.0)) throw ParseError("bump-width must be positive");
            for (int k = 1; k <= count; ++k) {
                double shift = 1.0 / k;
                setup.family.push_back(sampled_1d(lo, hi, cells, [c, w, shift](double x) {
                    double u = (x - shift - c) / w;
                    double r2 = u * u;
                    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
                }));
            }
        } else {
            throw ParseError("unknown family recipe '" + toks[0] + "'");
        }
    }
    int fallback = setup.family.front().dim() == 1 ? 12 : 6;
    setup.dense_levels = static_cast<int>(
        io::detail::parse_int(optional_field(s, "dense-levels", std::to_string(fallback))));
    if (setup.dense_levels < 0 || setup.dense_levels > 24) {
        throw ParseError("dense-levels out of range");
    }
    return setup;
}

inline std::vector<int> parse_mollifier_schedule(const Scenario& s) {
    auto toks = field_tokens(require_field(s, "mollifiers"));
    std::vector<int> schedule;
    for (const auto& t : toks) {
        long long m = io::detail::parse_int(t);
        if (m < 1 || m > 1 << 20) throw ParseError("mollifier index out of range");
        if (!schedule.empty() && m <= schedule.back()) {
            throw ParseError("mollifier schedule must be strictly increasing");
        }
        schedule.push_back(static_cast<int>(m));
    }
    if (schedule.empty()) throw ParseError("empty mollifier schedule");
    return schedule;
}

struct ChooseSetup {
    std::vector<std::vector<std::string>> sets;
    std::function<FiniteFn(int)> witness;
    std::vector<double> lambda;
    std::function<QuotientClass(const std::vector<std::string>&)> oracle;
};

inline std::vector<std::vector<std::string>> parse_sets(const Scenario& s) {
    auto toks = field_tokens(require_field(s, "sets"));
    if (toks.empty()) throw ParseError("empty sets field");
    if (toks[0] == "groups") {
        std::string rest;
        for (std::size_t i = 1; i < toks.size(); ++i) rest += toks[i] + " ";
        return parse_spaces("groups " + rest, 1);
    }
    if (toks[0] == "shifted-triples") {
        if (toks.size() != 2) throw ParseError("'shifted-triples' needs a count");
        long long n = io::detail::parse_int(toks[1]);
        if (n < 1 || n > 4096) throw ParseError("set count out of range");
        std::vector<std::vector<std::string>> sets;
        for (long long k = 1; k <= n; ++k) {
            sets.push_back({std::to_string(k), std::to_string(k + 1), std::to_string(k + 2)});
        }
        return sets;
    }
    if (toks[0] == "prefix-ranges") {
        if (toks.size() != 2) throw ParseError("'prefix-ranges' needs a count");
        long long n = io::detail::parse_int(toks[1]);
        if (n < 1 || n > 4096) throw ParseError("set count out of range");
        std::vector<std::vector<std::string>> sets;
        for (long long k = 1; k <= n; ++k) {
            std::vector<std::string> labels;
            for (long long j = 1; j <= 2 * k; ++j) labels.push_back(std::to_string(j));
            sets.push_back(std::move(labels));
        }
        return sets;
    }
    throw ParseError("sets must start with 'groups', 'shifted-triples', or 'prefix-ranges'");
}

inline ChooseSetup build_choose_finite(const Scenario& s) {
    reject_unknown_fields(s, {"sets", "witness", "out"});
    ChooseSetup setup;
    setup.sets = parse_sets(s);
    auto toks = field_tokens(require_field(s, "witness"));
    if (toks.empty()) throw ParseError("empty witness field");
    auto sets = setup.sets;
    if (toks[0] == "geometric-min") {
        setup.witness = [sets](int n) {
            const auto& labels = sets[static_cast<std::size_t>(n - 1)];
            return std::ldexp(1.0, -n) * FiniteFn::indicator(labels, min_label(labels));
        };
    } else if (toks[0] == "zero") {
        setup.witness = [sets](int n) {
            return FiniteFn::zero(sets[static_cast<std::size_t>(n - 1)]);
        };
    } else if (toks[0] == "files") {
        if (toks.size() != sets.size() + 1) {
            throw ParseError("witness file count must match the set count");
        }
        std::vector<FiniteFn> parsed;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            std::filesystem::path p = s.dir / toks[i];
            if (!std::filesystem::exists(p)) {
                throw ParseError("referenced file does not exist: " + p.string());
            }
            parsed.push_back(io::read_finite_fn(p));
        }
        setup.witness = [parsed](int n) { return parsed[static_cast<std::size_t>(n - 1)]; };
    } else {
        throw ParseError("unknown witness recipe '" + toks[0] + "'");
    }
    return setup;
}

inline ChooseSetup build_choose_asymptotic(const Scenario& s) {
    reject_unknown_fields(s, {"sets", "lambda", "witness", "out"});
    ChooseSetup setup;
    setup.sets = parse_sets(s);
    auto lam = field_tokens(require_field(s, "lambda"));
    if (lam.size() == 1 && lam[0] == "linear") {
        for (std::size_t n = 1; n <= setup.sets.size(); ++n) {
            setup.lambda.push_back(static_cast<double>(n));
        }
    } else {
        for (const auto& t : lam) setup.lambda.push_back(io::detail::parse_double(t));
        if (setup.lambda.size() != setup.sets.size()) {
            throw ParseError("lambda list length must match the set count");
        }
    }
    std::string witness = require_field(s, "witness");
    if (witness != "uniform-prefix") {
        throw ParseError("unknown witness recipe '" + witness + "'");
    }
    auto sets = setup.sets;
    setup.witness = [sets](int n) {
        const auto& labels = sets[static_cast<std::size_t>(n - 1)];
        std::vector<double> values(labels.size(), 0.0);
        std::size_t prefix = std::min(labels.size(), static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < prefix; ++j) {
            values[j] = 1.0 / static_cast<double>(n);
        }
        return FiniteFn(labels, values);
    };
    return setup;
}

inline ChooseSetup build_choose_singleton(const Scenario& s) {
    reject_unknown_fields(s, {"sets", "oracle", "out"});
    ChooseSetup setup;
    setup.sets = parse_sets(s);
    std::string oracle = require_field(s, "oracle");
    if (oracle == "position-ramp") {
        setup.oracle = [](const std::vector<std::string>& labels) {
            std::vector<double> values(labels.size());
            for (std::size_t i = 0; i < labels.size(); ++i) values[i] = static_cast<double>(i);
            return QuotientClass(FiniteFn(labels, values));
        };
    } else if (oracle == "last-indicator") {
        setup.oracle = [](const std::vector<std::string>& labels) {
            return QuotientClass(FiniteFn::indicator(labels, labels.back()));
        };
    } else {
        throw ParseError("unknown oracle recipe '" + oracle + "'");
    }
    return setup;
}

} // namespace detail

// Structural validation without running the experiment: key sets, value
// shapes, schedules, referenced files.
inline void validate_scenario(const Scenario& s) {
    if (s.kind == "ubp-witness") {
        detail::build_ubp(s);
    } else if (s.kind == "weak-ubp") {
        detail::build_weak_ubp(s);
    } else if (s.kind == "aa-extract") {
        detail::build_aa_family(s);
        detail::parse_eps_schedule(s);
    } else if (s.kind == "fk-extract") {
        detail::build_fk_family(s);
        detail::parse_mollifier_schedule(s);
        auto eps = detail::double_list(detail::require_field(s, "eps"), "eps");
        if (eps.size() != 1 || !(eps[0] > 0.0)) {
            throw ParseError("fk-extract takes a single positive eps");
        }
        double p = io::detail::parse_double(detail::require_field(s, "p"));
        if (!(p >= 1.0)) throw ParseError("p must be at least 1");
    } else if (s.kind == "choose-finite") {
        detail::build_choose_finite(s);
    } else if (s.kind == "choose-asymptotic") {
        detail::build_choose_asymptotic(s);
    } else if (s.kind == "choose-singleton") {
        detail::build_choose_singleton(s);
    } else {
        throw ParseError("unknown kind '" + s.kind + "'");
    }
}

inline RunOutcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir,
                               OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir.string());
    RunOutcome outcome;
    auto emit = [&](const std::string& name, auto&& writer) {
        std::filesystem::path path = out_dir / name;
        io::write_text_file(path, writer);
        outcome.artifacts.push_back(path);
    };

    if (s.kind == "ubp-witness" || s.kind == "weak-ubp") {
        auto setup = s.kind == "ubp-witness" ? detail::build_ubp(s) : detail::build_weak_ubp(s);
        std::string out = detail::optional_field(s, "out", "certificate");
        HumpTrace trace = hump_sequence(setup.input);
        verify_trace_cauchy(trace, setup.input.family);
        CertificateTable table = divergence_certificate(trace, setup.input);
        if (format == OutputFormat::Csv) {
            emit(out + ".csv", [&](std::ostream& o) { io::emit_certificate_csv(o, table); });
        } else {
            emit(out + ".txt", [&](std::ostream& o) { io::emit_certificate_text(o, table); });
        }
        for (const auto& row : table) {
            if (!row.pass) {
                outcome.status = 4;
                outcome.diagnostic = "certificate row " + std::to_string(row.n) +
                                     " violates ||T_n(y)|| >= (1/6) * 3^-n * bound: observed " +
                                     io::fmt_g(row.observed) + " < required " +
                                     io::fmt_g(row.required);
                return outcome;
            }
        }
        return outcome;
    }

    if (s.kind == "aa-extract") {
        auto setup = detail::build_aa_family(s);
        auto eps = detail::parse_eps_schedule(s);
        std::string out = detail::optional_field(s, "out", "extraction");
        auto dense = dyadic_dense_points(setup.family.front().box(), setup.dense_levels);
        ExtractionResult res = aa_extract(setup.family, dense, eps);
        emit(out + ".txt", [&](std::ostream& o) { io::emit_extraction_result(o, res); });
        if (format == OutputFormat::Csv) {
            emit(out + "-cauchy.csv", [&](std::ostream& o) {
                o << "i,j,distance\n";
                for (const auto& e : res.cauchy) {
                    o << e.i << "," << e.j << "," << io::fmt_g(e.distance) << "\n";
                }
            });
        }
        return outcome;
    }

    if (s.kind == "fk-extract") {
        auto setup = detail::build_fk_family(s);
        auto schedule = detail::parse_mollifier_schedule(s);
        double eps = detail::double_list(detail::require_field(s, "eps"), "eps").at(0);
        Exponent p(io::detail::parse_double(detail::require_field(s, "p")));
        std::string out = detail::optional_field(s, "out", "extraction");
        FkOptions opts;
        opts.dense_levels = setup.dense_levels;
        FkResult res = fk_extract(setup.family, p, schedule, eps, opts);
        emit(out + ".txt",
             [&](std::ostream& o) { io::emit_extraction_result(o, res.extraction); });
        emit(out + "-smoothing.txt", [&](std::ostream& o) {
            o << "smoothing-report\n";
            o << "kernel-index " << res.kernel_index << "\n";
            o << "schedule " << res.schedule.size();
            for (int m : res.schedule) o << " " << m;
            o << "\n";
            o << "bounds " << res.smoothing_bounds.size();
            for (double b : res.smoothing_bounds) o << " " << io::fmt_g(b);
            o << "\n";
        });
        if (format == OutputFormat::Csv) {
            emit(out + "-cauchy.csv", [&](std::ostream& o) {
                o << "i,j,distance\n";
                for (const auto& e : res.extraction.cauchy) {
                    o << e.i << "," << e.j << "," << io::fmt_g(e.distance) << "\n";
                }
            });
        }
        return outcome;
    }

    if (s.kind == "choose-finite" || s.kind == "choose-asymptotic") {
        auto setup = s.kind == "choose-finite" ? detail::build_choose_finite(s)
                                               : detail::build_choose_asymptotic(s);
        std::string out = detail::optional_field(s, "out", "report");
        SelectionReport report = s.kind == "choose-finite"
                                     ? partial_cmc_demo(setup.sets, setup.witness)
                                     : asymptotic_choice_demo(setup.sets, setup.lambda,
                                                              setup.witness);
        emit(out + ".txt", [&](std::ostream& o) { io::emit_selection_report(o, report); });
        return outcome;
    }

    if (s.kind == "choose-singleton") {
        auto setup = detail::build_choose_singleton(s);
        std::string out = detail::optional_field(s, "out", "refined");
        RefineResult res = refine_to_singleton(setup.sets, setup.oracle);
        emit(out + ".txt", [&](std::ostream& o) {
            o << "singleton-report\n";
            o << "sets " << res.singletons.size() << "\n";
            for (std::size_t i = 0; i < res.singletons.size(); ++i) {
                o << (i + 1) << " " << res.steps[i] << " " << res.singletons[i] << "\n";
            }
        });
        return outcome;
    }

    throw ParseError("unknown kind '" + s.kind + "'");
}

} // namespace cfa
