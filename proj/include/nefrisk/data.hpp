#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "fitting.hpp"

namespace nefrisk {

/// One rating cell of the motor third-party data set.
struct ClaimRecord {
    int kilometres = 0;
    int zone = 0;
    int bonus = 0;
    int make = 0;
    double insured = 0.0;
    std::int64_t claims = 0;
    double payment = 0.0;
};

inline constexpr std::size_t kRecordColumns = 7;

/// Per-column allowed values; an absent column accepts anything.
struct SubsetFilter {
    std::string name;
    std::map<std::string, std::set<int>> allowed;

    bool accepts(const ClaimRecord& r) const {
        auto ok = [&](const char* col, int v) {
            auto it = allowed.find(col);
            return it == allowed.end() || it->second.count(v) > 0;
        };
        return ok("kilometres", r.kilometres) && ok("zone", r.zone) && ok("bonus", r.bonus) &&
               ok("make", r.make);
    }
};

/// Zones 1 and 2 (Stockholm/Goteborg/Malmo and the other large cities). Each
/// zone holds 5 x 7 x 9 = 315 km/bonus/make cells, 630 together.
inline SubsetFilter larger_cities_filter() { return {"larger_cities", {{"zone", {1, 2}}}}; }

inline SubsetFilter all_records_filter() { return {"all", {}}; }

inline SubsetFilter named_filter(std::string_view name) {
    if (name == "larger_cities") return larger_cities_filter();
    if (name == "all") return all_records_filter();
    throw std::invalid_argument("unknown filter: " + std::string(name));
}

/// Parses "col=v1,v2;col2=v3" into a filter.
inline SubsetFilter parse_filter_spec(std::string_view spec) {
    SubsetFilter f{"custom", {}};
    std::string s(spec);
    std::stringstream clauses(s);
    std::string clause;
    static const std::set<std::string> columns = {"kilometres", "zone", "bonus", "make"};
    while (std::getline(clauses, clause, ';')) {
        if (clause.empty()) continue;
        const auto eq = clause.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("filter clause without '=': " + clause);
        }
        const std::string col = clause.substr(0, eq);
        if (!columns.count(col)) {
            throw std::invalid_argument("filter on unknown column: " + col);
        }
        std::stringstream vals(clause.substr(eq + 1));
        std::string v;
        auto& set = f.allowed[col];
        while (std::getline(vals, v, ',')) {
            set.insert(std::stoi(v));
        }
    }
    return f;
}

inline std::vector<ClaimRecord> apply_filter(const std::vector<ClaimRecord>& recs, const SubsetFilter& f) {
    std::vector<ClaimRecord> out;
    std::copy_if(recs.begin(), recs.end(), std::back_inserter(out), [&](const auto& r) { return f.accepts(r); });
    return out;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == ';' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    std::string t = s;
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
    const char* b = t.data();
    const char* e = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

} // namespace detail

/// Reads the 7-column table (kilometres zone bonus make insured claims
/// payment), whitespace or comma separated, optional non-numeric header.
/// Payments are divided by scale_divisor.
inline std::vector<ClaimRecord> load_dataset(std::istream& in, double scale_divisor = 1000.0) {
    if (!(scale_divisor > 0.0)) {
        throw std::invalid_argument("scale divisor must be positive");
    }
    std::vector<ClaimRecord> out;
    std::string line;
    std::size_t lineno = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = detail::split_fields(line);
        if (f.empty() || f[0][0] == '#') continue;
        double v[kRecordColumns];
        bool numeric = f.size() == kRecordColumns;
        for (std::size_t i = 0; numeric && i < kRecordColumns; ++i) {
            numeric = detail::parse_double(f[i], v[i]);
        }
        if (!seen_data && !numeric) {
            double dummy;
            const bool any_numeric = std::any_of(f.begin(), f.end(), [&](const auto& s) {
                return detail::parse_double(s, dummy);
            });
            if (!any_numeric) {
                seen_data = true;  // header
                continue;
            }
        }
        seen_data = true;
        if (f.size() != kRecordColumns) {
            throw DataError("line " + std::to_string(lineno) + ": expected 7 columns, found " +
                            std::to_string(f.size()));
        }
        if (!numeric) {
            throw DataError("line " + std::to_string(lineno) + ": non-numeric field");
        }
        ClaimRecord r;
        r.kilometres = static_cast<int>(v[0]);
        r.zone = static_cast<int>(v[1]);
        r.bonus = static_cast<int>(v[2]);
        r.make = static_cast<int>(v[3]);
        r.insured = v[4];
        r.claims = static_cast<std::int64_t>(v[5]);
        r.payment = v[6] / scale_divisor;
        if (r.insured < 0.0 || r.claims < 0 || r.payment < 0.0 ||
            static_cast<double>(r.claims) != v[5]) {
            throw DataError("line " + std::to_string(lineno) + ": negative or fractional value");
        }
        out.push_back(r);
    }
    return out;
}

inline std::vector<ClaimRecord> load_dataset(const std::string& path, double scale_divisor = 1000.0) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open data file: " + path);
    }
    return load_dataset(in, scale_divisor);
}

struct DataSummary {
    SampleMoments count_moments;
    SampleMoments aggregate_moments;
    double total_claims = 0.0;
    double total_payment = 0.0;
    std::size_t rows = 0;
    /// Rows with claims = 0 but a positive payment (kept, only counted).
    std::size_t zero_claim_payments = 0;
};

inline DataSummary summarize(const std::vector<ClaimRecord>& recs) {
    if (recs.size() < 2) {
        throw std::invalid_argument("summarize: need at least 2 records");
    }
    std::vector<double> n, s;
    n.reserve(recs.size());
    s.reserve(recs.size());
    DataSummary d;
    for (const auto& r : recs) {
        n.push_back(static_cast<double>(r.claims));
        s.push_back(r.payment);
        d.total_claims += static_cast<double>(r.claims);
        d.total_payment += r.payment;
        if (r.claims == 0 && r.payment > 0.0) ++d.zero_claim_payments;
    }
    d.count_moments = moments_of(n);
    d.aggregate_moments = moments_of(s);
    d.rows = recs.size();
    return d;
}

inline std::vector<double> aggregate_payments(const std::vector<ClaimRecord>& recs) {
    std::vector<double> s;
    s.reserve(recs.size());
    for (const auto& r : recs) s.push_back(r.payment);
    return s;
}

} // namespace nefrisk
