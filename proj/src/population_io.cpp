#include "lexids/population_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <tuple>

#include "lexids/method.hpp"

namespace lexids {

namespace {

std::string where(const std::string& path, int line) {
    return path + ":" + std::to_string(line) + ": ";
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename T>
T parse_number(std::string_view field, const std::string& path, int line, const char* what) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw ParseError(where(path, line) + "expected " + what + ", got '" + std::string(field) +
                         "'");
    }
    return value;
}

// strips one trailing \r so CRLF files parse
std::string_view chomp(const std::string& line) {
    std::string_view v = line;
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    return v;
}

void check_label(const std::string& label) {
    if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos) {
        throw std::invalid_argument("label must not contain commas or newlines");
    }
}

std::vector<int> parse_niche_line(std::span<const std::string_view> fields, int expected,
                                  const std::string& path, int line, const char* what) {
    if (static_cast<int>(fields.size()) - 1 != expected) {
        throw ParseError(where(path, line) + std::string(what) + " needs " +
                         std::to_string(expected) + " entries, got " +
                         std::to_string(fields.size() - 1));
    }
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(expected));
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const int id = parse_number<int>(fields[i], path, line, "a niche id");
        if (id < 0) throw ParseError(where(path, line) + "negative niche id");
        ids.push_back(id);
    }
    return ids;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

PopulationData read_population(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");

    std::string raw;
    int line_no = 1;
    if (!std::getline(in, raw)) throw ParseError(where(path, 1) + "empty file");
    const auto header = split_commas(chomp(raw));
    if (header.size() < 5 || header.size() > 6 || header[0] != "errmat" || header[1] != "v1") {
        throw ParseError(where(path, 1) +
                         "malformed header, expected 'errmat,v1,N,T,threshold[,label]'");
    }
    const int n = parse_number<int>(header[2], path, 1, "an individual count");
    const int t = parse_number<int>(header[3], path, 1, "a case count");
    const double threshold = parse_number<double>(header[4], path, 1, "a solve threshold");
    const std::string label = header.size() == 6 ? std::string(header[5]) : std::string();
    if (n < 1 || t < 1) throw ParseError(where(path, 1) + "counts must be >= 1");
    if (!std::isfinite(threshold) || threshold < 0.0) {
        throw ParseError(where(path, 1) + "solve threshold must be finite and >= 0");
    }

    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(t));
    for (int row = 0; row < n; ++row) {
        ++line_no;
        if (!std::getline(in, raw)) {
            throw ParseError(where(path, line_no) + "unexpected end of file, expected row " +
                             std::to_string(row + 1) + " of " + std::to_string(n));
        }
        const auto fields = split_commas(chomp(raw));
        if (static_cast<int>(fields.size()) != t) {
            throw ParseError(where(path, line_no) + "row " + std::to_string(row + 1) + " has " +
                             std::to_string(fields.size()) + " values, expected " +
                             std::to_string(t));
        }
        for (int col = 0; col < t; ++col) {
            const double v =
                parse_number<double>(fields[static_cast<std::size_t>(col)], path, line_no,
                                     "an error value");
            if (!std::isfinite(v)) {
                throw ParseError(where(path, line_no) + "non-finite error in column " +
                                 std::to_string(col + 1));
            }
            if (v < 0.0) {
                throw ParseError(where(path, line_no) + "negative error in column " +
                                 std::to_string(col + 1));
            }
            errors.push_back(v);
        }
    }

    std::vector<int> individual_niche;
    std::vector<int> case_niche;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto view = chomp(raw);
        if (view.empty()) continue;
        const auto fields = split_commas(view);
        if (fields[0] == "individual-niches") {
            if (!individual_niche.empty()) {
                throw ParseError(where(path, line_no) + "duplicate individual-niches line");
            }
            individual_niche = parse_niche_line(fields, n, path, line_no, "individual-niches");
        } else if (fields[0] == "case-niches") {
            if (!case_niche.empty()) {
                throw ParseError(where(path, line_no) + "duplicate case-niches line");
            }
            case_niche = parse_niche_line(fields, t, path, line_no, "case-niches");
        } else {
            throw ParseError(where(path, line_no) + "unexpected line '" +
                             std::string(view.substr(0, 32)) + "'");
        }
    }

    return PopulationData{ErrorMatrix(n, t, std::move(errors), threshold, label),
                          std::move(individual_niche), std::move(case_niche)};
}

void write_population(const PopulationData& pop, const std::string& path) {
    const auto& m = pop.matrix;
    check_label(m.label());
    if (!pop.individual_niche.empty() &&
        static_cast<int>(pop.individual_niche.size()) != m.individuals()) {
        throw std::invalid_argument("individual niche map size does not match the population");
    }
    if (!pop.case_niche.empty() && static_cast<int>(pop.case_niche.size()) != m.cases()) {
        throw std::invalid_argument("case niche map size does not match the population");
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    out << "errmat,v1," << m.individuals() << ',' << m.cases() << ','
        << format_double(m.solve_threshold());
    if (!m.label().empty()) out << ',' << m.label();
    out << '\n';
    for (int i = 0; i < m.individuals(); ++i) {
        const double* row = m.row_data(i);
        for (int c = 0; c < m.cases(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
    if (!pop.individual_niche.empty()) {
        out << "individual-niches";
        for (int id : pop.individual_niche) out << ',' << id;
        out << '\n';
    }
    if (!pop.case_niche.empty()) {
        out << "case-niches";
        for (int id : pop.case_niche) out << ',' << id;
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

static const char* const kRecordsHeader =
    "population_id,method,rate,rep_or_round,seed,coverage_before,coverage_after,loss";

void write_records(std::span<const ResultRecord> records, const std::string& path) {
    if (records.empty()) throw std::invalid_argument("write_records: no records");
    for (const auto& r : records) check_label(r.population_id);

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = records[x];
        const auto& b = records[y];
        return std::tuple(std::string_view(a.population_id), method_name(a.method), a.rate,
                          a.replicate, a.rep_or_round) <
               std::tuple(std::string_view(b.population_id), method_name(b.method), b.rate,
                          b.replicate, b.rep_or_round);
    });

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << kRecordsHeader << '\n';
    for (std::size_t i : order) {
        const auto& r = records[i];
        out << r.population_id << ',' << method_name(r.method) << ',' << format_double(r.rate)
            << ',' << r.rep_or_round << ',' << r.seed << ',' << r.coverage_before << ','
            << r.coverage_after << ',' << r.loss << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<ResultRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");

    std::string raw;
    if (!std::getline(in, raw) || chomp(raw) != kRecordsHeader) {
        throw ParseError(where(path, 1) + "malformed records header");
    }

    std::vector<ResultRecord> records;
    int line_no = 1;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto view = chomp(raw);
        if (view.empty()) continue;
        const auto fields = split_commas(view);
        if (fields.size() != 8) {
            throw ParseError(where(path, line_no) + "expected 8 fields, got " +
                             std::to_string(fields.size()));
        }
        ResultRecord r;
        r.population_id = std::string(fields[0]);
        const auto method = parse_method(fields[1]);
        if (!method) {
            throw ParseError(where(path, line_no) + "unknown method '" + std::string(fields[1]) +
                             "'");
        }
        r.method = *method;
        r.rate = parse_number<double>(fields[2], path, line_no, "a rate");
        r.rep_or_round = parse_number<int>(fields[3], path, line_no, "a repetition or round");
        r.replicate = r.rep_or_round;
        r.seed = parse_number<std::uint64_t>(fields[4], path, line_no, "a seed");
        r.coverage_before = parse_number<int>(fields[5], path, line_no, "a coverage count");
        r.coverage_after = parse_number<int>(fields[6], path, line_no, "a coverage count");
        r.loss = parse_number<int>(fields[7], path, line_no, "a loss");
        if (!(r.rate > 0.0) || r.rate > 1.0) {
            throw ParseError(where(path, line_no) + "rate outside (0, 1]");
        }
        if (r.loss != r.coverage_before - r.coverage_after) {
            throw ParseError(where(path, line_no) + "loss does not equal before - after");
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) throw ParseError(path + ": no data rows");
    return records;
}

}  // namespace lexids
