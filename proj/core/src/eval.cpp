#include "epimem/eval.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"
#include "rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace epimem {

namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string canonical_integer(const std::string& token) {
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return token;
    }
    const auto nz = token.find_first_not_of('0');
    return nz == std::string::npos ? "0" : token.substr(nz);
}

// Linear-interpolated quantile of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

Interval95 summarize(std::vector<double> means) {
    double sum = 0.0;
    for (double m : means) sum += m;
    std::sort(means.begin(), means.end());
    return Interval95{sum / static_cast<double>(means.size()), quantile(means, 0.025), quantile(means, 0.975)};
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string s = to_lower(text);
    for (;;) {
        const std::size_t before = s.size();
        s = trim(s);
        while (!s.empty() && is_punct(s.front())) s.erase(0, 1);
        while (!s.empty() && is_punct(s.back())) s.pop_back();
        if (s.size() == before) break;
    }
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : s) {
        if (is_space(c)) {
            if (!cur.empty()) tokens.push_back(canonical_integer(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(canonical_integer(cur));
    return join(tokens, " ");
}

int exact_match(std::string_view pred, std::string_view gold) {
    return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

RunReport score_run(std::span<const AnsweredQuestion> answers, std::uint64_t bootstrap_seed,
                    std::size_t bootstrap_resamples) {
    if (answers.empty()) throw Error("score_run needs at least one answer");
    RunReport r;
    r.protocol = std::string(to_string(answers.front().answer.protocol));
    std::vector<int> correctness;
    correctness.reserve(answers.size());
    double tokens = 0.0;
    for (const auto& a : answers) {
        if (!a.evidence_episode.empty() && a.evidence_episode != a.item.episode_id) throw Error("dataset mismatch");
        const int ok = exact_match(a.answer.text, a.item.gold_answer);
        correctness.push_back(ok);
        r.correct += static_cast<std::size_t>(ok);
        tokens += static_cast<double>(a.token_cost);
        auto& f = r.per_family[a.item.family];
        f.correct += static_cast<std::size_t>(ok);
        ++f.n;
    }
    r.n_questions = answers.size();
    r.em = static_cast<double>(r.correct) / static_cast<double>(r.n_questions);
    r.avg_tokens = tokens / static_cast<double>(r.n_questions);
    for (auto& [_, f] : r.per_family) f.em = static_cast<double>(f.correct) / static_cast<double>(f.n);
    const auto ci = bootstrap_ci(correctness, bootstrap_resamples, bootstrap_seed);
    r.ci_center = ci.center;
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    return r;
}

Interval95 bootstrap_ci(std::span<const int> correctness, std::size_t resamples, std::uint64_t seed) {
    if (correctness.empty()) throw Error("bootstrap needs n >= 1");
    if (resamples == 0) throw Error("bootstrap needs at least one resample");
    const std::size_t n = correctness.size();
    std::vector<double> means(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        detail::Rng rng(detail::mix_seed(seed, b));
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += correctness[rng.below(n)] != 0 ? 1 : 0;
        means[b] = static_cast<double>(hits) / static_cast<double>(n);
    }
    return summarize(std::move(means));
}

Interval95 paired_bootstrap(std::span<const int> a, std::span<const int> b, std::size_t resamples, std::uint64_t seed) {
    if (a.size() != b.size()) throw Error("paired bootstrap needs aligned lists of equal length");
    if (a.empty()) throw Error("bootstrap needs n >= 1");
    if (resamples == 0) throw Error("bootstrap needs at least one resample");
    const std::size_t n = a.size();
    std::vector<double> diffs(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        detail::Rng rng(detail::mix_seed(seed, r));
        long d = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = rng.below(n);
            d += (a[j] != 0 ? 1 : 0) - (b[j] != 0 ? 1 : 0);
        }
        diffs[r] = static_cast<double>(d) / static_cast<double>(n);
    }
    return summarize(std::move(diffs));
}

std::vector<FrontierEntry> frontier(std::span<const RunReport> reports) {
    std::vector<FrontierEntry> out;
    for (const auto& r : reports) {
        bool dominated = false;
        for (const auto& o : reports) {
            if (o.em > r.em && o.avg_tokens < r.avg_tokens) dominated = true;
        }
        out.push_back(FrontierEntry{r.method, r.label, r.em, r.avg_tokens, !dominated});
    }
    std::stable_sort(out.begin(), out.end(), [](const FrontierEntry& x, const FrontierEntry& y) {
        if (x.em != y.em) return x.em > y.em;
        if (x.avg_tokens != y.avg_tokens) return x.avg_tokens < y.avg_tokens;
        return x.method < y.method;
    });
    return out;
}

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }
std::string lpad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace

std::string frontier_table(std::span<const RunReport> reports) {
    const auto entries = frontier(reports);
    std::size_t w = 6;
    for (const auto& e : entries) w = std::max(w, (e.label.empty() ? e.method : e.method + " " + e.label).size());
    std::ostringstream os;
    os << pad("Method", w) << "  " << lpad("EM", 6) << "  " << lpad("Avg. Tokens", 11) << "  Pareto\n";
    for (const auto& e : entries) {
        os << pad(e.label.empty() ? e.method : e.method + " " + e.label, w) << "  " << lpad(fixed(e.em, 4), 6) << "  "
           << lpad(fixed(e.avg_tokens, 2), 11) << "  " << (e.pareto ? "yes" : "no") << "\n";
    }
    return os.str();
}

std::string frontier_json(std::span<const RunReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : frontier(reports)) {
        arr.push_back({{"method", e.method}, {"label", e.label}, {"em", e.em}, {"avg_tokens", e.avg_tokens},
                       {"pareto", e.pareto}});
    }
    return arr.dump(2);
}

std::string report_to_json(const RunReport& r) {
    nlohmann::json fam = nlohmann::json::object();
    for (const auto& [name, f] : r.per_family) fam[name] = {{"em", f.em}, {"correct", f.correct}, {"n", f.n}};
    nlohmann::json j = {{"method", r.method},       {"protocol", r.protocol},     {"label", r.label},
                        {"em", r.em},               {"avg_tokens", r.avg_tokens}, {"per_family", fam},
                        {"n_questions", r.n_questions}, {"correct", r.correct},   {"ci_center", r.ci_center},
                        {"ci_low", r.ci_low},       {"ci_high", r.ci_high},       {"config_hash", r.config_hash}};
    return j.dump(2);
}

RunReport report_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RunReport r;
        r.method = j.at("method").get<std::string>();
        r.protocol = j.at("protocol").get<std::string>();
        r.label = j.value("label", std::string{});
        r.em = j.at("em").get<double>();
        r.avg_tokens = j.at("avg_tokens").get<double>();
        for (const auto& [name, f] : j.at("per_family").items()) {
            r.per_family[name] = FamilyScore{f.at("em").get<double>(), f.at("correct").get<std::size_t>(),
                                             f.at("n").get<std::size_t>()};
        }
        r.n_questions = j.at("n_questions").get<std::size_t>();
        r.correct = j.at("correct").get<std::size_t>();
        r.ci_center = j.value("ci_center", 0.0);
        r.ci_low = j.value("ci_low", 0.0);
        r.ci_high = j.value("ci_high", 0.0);
        r.config_hash = j.value("config_hash", std::string{});
        return r;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed report: ") + ex.what());
    }
}

std::string report_table(std::span<const RunReport> reports) {
    std::size_t w = 6;
    for (const auto& r : reports) w = std::max(w, (r.label.empty() ? r.method : r.method + " " + r.label).size());
    std::ostringstream os;
    os << pad("Method", w) << "  " << lpad("EM", 6) << "  " << lpad("95% CI", 15) << "  " << lpad("Avg. Tokens", 11)
       << "  " << lpad("n", 5) << "\n";
    for (const auto& r : reports) {
        os << pad(r.label.empty() ? r.method : r.method + " " + r.label, w) << "  " << lpad(fixed(r.em, 4), 6) << "  "
           << lpad("[" + fixed(r.ci_low, 4) + ", " + fixed(r.ci_high, 4) + "]", 15) << "  "
           << lpad(fixed(r.avg_tokens, 2), 11) << "  " << lpad(std::to_string(r.n_questions), 5) << "\n";
    }
    return os.str();
}

}  // namespace epimem
