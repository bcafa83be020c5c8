#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spmld/dataset.hpp"
#include "spmld/errors.hpp"
#include "spmld/partition.hpp"

namespace spmld {
namespace ioutil {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool parse_size(std::string_view tok, std::size_t& out) {
    if (tok.empty()) return false;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

inline bool parse_double(std::string_view tok, double& out) {
    if (tok.empty()) return false;
    std::string buf(tok);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

inline bool starts_with_nocase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace ioutil

// ---------------------------------------------------------------------------
// Sparse multi-label text format. One instance per line:
//
//   <label-id>[,<label-id>]* <feat-idx>:<value>[ <feat-idx>:<value>]*
//
// An empty label list is a leading space. `#` starts a comment, except the
// optional header `#labels: L #features: D`. Unlisted labels are -1,
// unlisted features 0, and the mask comes back all ones.
inline MultiLabelDataset parse_sparse_multilabel(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t declared_labels = 0;
    std::size_t declared_features = 0;

    struct Row {
        std::vector<std::size_t> labels;
        std::vector<std::pair<std::size_t, double>> feats;
    };
    std::vector<Row> rows;
    std::size_t max_label = 0;
    std::size_t max_feature = 0;
    bool any_label = false;
    bool any_feature = false;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (ioutil::starts_with_nocase(view, "#labels:")) {
            std::istringstream hs{std::string(view)};
            std::string t1, t2;
            std::size_t l_val = 0;
            std::size_t d_val = 0;
            if (!(hs >> t1 >> l_val >> t2 >> d_val) || t1 != "#labels:" ||
                t2 != "#features:")
                throw ParseError("malformed header, expected '#labels: L #features: D'",
                                 line_no);
            have_header = true;
            declared_labels = l_val;
            declared_features = d_val;
            continue;
        }
        if (!view.empty() && view.front() == '#') continue;
        if (ioutil::trim(view).empty()) continue;

        Row row;
        const std::size_t space = view.find(' ');
        std::string_view label_field = space == std::string_view::npos ? view : view.substr(0, space);
        std::string_view rest = space == std::string_view::npos ? std::string_view{} : view.substr(space + 1);

        if (!label_field.empty()) {
            for (std::string_view tok : ioutil::split(label_field, ',')) {
                std::size_t id = 0;
                if (!ioutil::parse_size(tok, id))
                    throw ParseError("malformed label id '" + std::string(tok) + "'", line_no);
                if (have_header && id >= declared_labels)
                    throw RangeError("line " + std::to_string(line_no) + ": label id " +
                                     std::to_string(id) + " >= declared " +
                                     std::to_string(declared_labels));
                row.labels.push_back(id);
                max_label = std::max(max_label, id);
                any_label = true;
            }
        }

        std::istringstream fs{std::string(rest)};
        std::string tok;
        std::vector<bool> seen;
        while (fs >> tok) {
            const std::size_t colon = tok.find(':');
            if (colon == std::string::npos)
                throw ParseError("malformed feature token '" + tok + "'", line_no);
            std::size_t idx = 0;
            double value = 0.0;
            if (!ioutil::parse_size(std::string_view(tok).substr(0, colon), idx) ||
                !ioutil::parse_double(std::string_view(tok).substr(colon + 1), value))
                throw ParseError("malformed feature token '" + tok + "'", line_no);
            if (have_header && idx >= declared_features)
                throw RangeError("line " + std::to_string(line_no) + ": feature index " +
                                 std::to_string(idx) + " >= declared " +
                                 std::to_string(declared_features));
            if (idx >= seen.size()) seen.resize(idx + 1, false);
            if (seen[idx])
                throw ParseError("duplicate feature index " + std::to_string(idx), line_no);
            seen[idx] = true;
            row.feats.emplace_back(idx, value);
            max_feature = std::max(max_feature, idx);
            any_feature = true;
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw ParseError("no data lines");
    const std::size_t l = have_header ? declared_labels : (any_label ? max_label + 1 : 1);
    const std::size_t d = have_header ? declared_features : (any_feature ? max_feature + 1 : 1);
    if (l == 0 || d == 0) throw ParseError("header declares zero labels or features");

    MultiLabelDataset ds;
    ds.features = Matrix(d, rows.size());
    ds.labels = Matrix(l, rows.size(), -1.0);
    ds.mask = Matrix(l, rows.size(), 1.0);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (std::size_t id : rows[j].labels) ds.labels(id, j) = 1.0;
        for (const auto& [idx, value] : rows[j].feats) ds.features(idx, j) = value;
    }
    ds.validate();
    return ds;
}

inline MultiLabelDataset parse_sparse_multilabel(const std::string& text) {
    std::istringstream in(text);
    return parse_sparse_multilabel(in);
}

inline void write_sparse_multilabel(std::ostream& os, const MultiLabelDataset& ds) {
    os << "#labels: " << ds.num_labels() << " #features: " << ds.dim() << "\n";
    for (std::size_t j = 0; j < ds.num_instances(); ++j) {
        bool first = true;
        for (std::size_t i = 0; i < ds.num_labels(); ++i) {
            if (ds.labels(i, j) > 0.0) {
                if (!first) os << ',';
                os << i;
                first = false;
            }
        }
        for (std::size_t r = 0; r < ds.dim(); ++r) {
            if (ds.features(r, j) != 0.0)
                os << ' ' << r << ':' << ioutil::format_double(ds.features(r, j));
        }
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// ARFF numeric subset: `@attribute <name> numeric` or `@attribute <name>
// {0,1}`, dense or sparse `{idx value, ...}` data rows, `%` comments. The
// last label_count attributes are the labels (1 -> +1, 0 -> -1).
inline MultiLabelDataset parse_arff_numeric(std::istream& in, std::size_t label_count) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> attr_names;
    std::vector<bool> attr_binary;
    bool in_data = false;

    std::vector<std::vector<double>> data_rows;

    auto parse_value = [&](std::string_view tok, std::size_t line_number) {
        double v = 0.0;
        if (!ioutil::parse_double(ioutil::trim(tok), v))
            throw ParseError("malformed numeric value '" + std::string(tok) + "'", line_number);
        return v;
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        view = ioutil::trim(view);
        if (view.empty() || view.front() == '%') continue;

        if (!in_data) {
            if (ioutil::starts_with_nocase(view, "@relation")) continue;
            if (ioutil::starts_with_nocase(view, "@attribute")) {
                std::string_view rest = ioutil::trim(view.substr(std::string_view("@attribute").size()));
                std::size_t name_end;
                std::string name;
                if (!rest.empty() && (rest.front() == '"' || rest.front() == '\'')) {
                    const char quote = rest.front();
                    name_end = rest.find(quote, 1);
                    if (name_end == std::string_view::npos)
                        throw ParseError("unterminated attribute name", line_no);
                    name = std::string(rest.substr(1, name_end - 1));
                    rest = ioutil::trim(rest.substr(name_end + 1));
                } else {
                    name_end = rest.find_first_of(" \t");
                    if (name_end == std::string_view::npos)
                        throw ParseError("attribute without a type", line_no);
                    name = std::string(rest.substr(0, name_end));
                    rest = ioutil::trim(rest.substr(name_end));
                }
                if (ioutil::starts_with_nocase(rest, "numeric") ||
                    ioutil::starts_with_nocase(rest, "real") ||
                    ioutil::starts_with_nocase(rest, "integer")) {
                    attr_binary.push_back(false);
                } else if (!rest.empty() && rest.front() == '{') {
                    std::string domain(rest.substr(1, rest.find('}') == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : rest.find('}') - 1));
                    std::vector<std::string> vals;
                    for (std::string_view tok : ioutil::split(domain, ','))
                        vals.emplace_back(ioutil::trim(tok));
                    std::sort(vals.begin(), vals.end());
                    if (vals != std::vector<std::string>{"0", "1"})
                        throw UnsupportedFormatError(
                            "line " + std::to_string(line_no) +
                            ": only the nominal domain {0,1} is supported");
                    attr_binary.push_back(true);
                } else {
                    throw UnsupportedFormatError("line " + std::to_string(line_no) +
                                                 ": unsupported attribute type '" +
                                                 std::string(rest) + "'");
                }
                attr_names.push_back(std::move(name));
                continue;
            }
            if (ioutil::starts_with_nocase(view, "@data")) {
                in_data = true;
                continue;
            }
            throw ParseError("unexpected line before @data", line_no);
        }

        const std::size_t n_attrs = attr_names.size();
        std::vector<double> row(n_attrs, 0.0);
        if (!view.empty() && view.front() == '{') {
            const std::size_t close = view.find('}');
            if (close == std::string_view::npos) throw ParseError("unterminated sparse row", line_no);
            std::string_view body = view.substr(1, close - 1);
            if (!ioutil::trim(body).empty()) {
                for (std::string_view entry : ioutil::split(body, ',')) {
                    entry = ioutil::trim(entry);
                    const std::size_t sep = entry.find_first_of(" \t");
                    if (sep == std::string_view::npos)
                        throw ParseError("malformed sparse entry '" + std::string(entry) + "'",
                                         line_no);
                    std::size_t idx = 0;
                    if (!ioutil::parse_size(entry.substr(0, sep), idx))
                        throw ParseError("malformed sparse index", line_no);
                    if (idx >= n_attrs)
                        throw RangeError("line " + std::to_string(line_no) +
                                         ": sparse index " + std::to_string(idx) +
                                         " out of range");
                    row[idx] = parse_value(entry.substr(sep + 1), line_no);
                }
            }
        } else {
            const auto parts = ioutil::split(view, ',');
            if (parts.size() != n_attrs)
                throw ParseError("expected " + std::to_string(n_attrs) + " values, got " +
                                 std::to_string(parts.size()), line_no);
            for (std::size_t i = 0; i < n_attrs; ++i) row[i] = parse_value(parts[i], line_no);
        }
        data_rows.push_back(std::move(row));
    }

    const std::size_t n_attrs = attr_names.size();
    if (!in_data) throw ParseError("missing @data section");
    if (label_count < 1 || label_count >= n_attrs)
        throw ConfigError("parse_arff_numeric: label_count must leave at least one feature");
    if (data_rows.empty()) throw ParseError("no data rows");

    const std::size_t d = n_attrs - label_count;
    const std::size_t n = data_rows.size();

    MultiLabelDataset ds;
    ds.features = Matrix(d, n);
    ds.labels = Matrix(label_count, n);
    ds.mask = Matrix(label_count, n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t a = 0; a < n_attrs; ++a) {
            const double v = data_rows[j][a];
            if (attr_binary[a] && v != 0.0 && v != 1.0)
                throw UnsupportedFormatError("nominal {0,1} attribute '" + attr_names[a] +
                                             "' holds value " + ioutil::format_double(v));
            if (a < d) {
                ds.features(a, j) = v;
            } else {
                if (v != 0.0 && v != 1.0)
                    throw UnsupportedFormatError("label attribute '" + attr_names[a] +
                                                 "' holds non-binary value " +
                                                 ioutil::format_double(v));
                ds.labels(a - d, j) = v == 1.0 ? 1.0 : -1.0;
            }
        }
    }
    ds.feature_names.assign(attr_names.begin(), attr_names.begin() + static_cast<long>(d));
    ds.label_names.assign(attr_names.begin() + static_cast<long>(d), attr_names.end());
    ds.validate();
    return ds;
}

inline MultiLabelDataset parse_arff_numeric(const std::string& text, std::size_t label_count) {
    std::istringstream in(text);
    return parse_arff_numeric(in, label_count);
}

inline void write_arff_numeric(std::ostream& os, const MultiLabelDataset& ds,
                               const std::string& relation = "spmld") {
    os << "@relation " << relation << "\n";
    for (std::size_t r = 0; r < ds.dim(); ++r) {
        const std::string name =
            ds.feature_names.empty() ? "f" + std::to_string(r) : ds.feature_names[r];
        os << "@attribute " << name << " numeric\n";
    }
    for (std::size_t i = 0; i < ds.num_labels(); ++i) {
        const std::string name =
            ds.label_names.empty() ? "label" + std::to_string(i) : ds.label_names[i];
        os << "@attribute " << name << " {0,1}\n";
    }
    os << "@data\n";
    for (std::size_t j = 0; j < ds.num_instances(); ++j) {
        for (std::size_t r = 0; r < ds.dim(); ++r) {
            if (r) os << ',';
            os << ioutil::format_double(ds.features(r, j));
        }
        for (std::size_t i = 0; i < ds.num_labels(); ++i)
            os << ',' << (ds.labels(i, j) > 0.0 ? '1' : '0');
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// Mask export: one `label_idx,instance_idx` line per observed cell.
inline void write_mask(std::ostream& os, const Matrix& mask) {
    for (std::size_t i = 0; i < mask.rows(); ++i)
        for (std::size_t j = 0; j < mask.cols(); ++j)
            if (mask(i, j) == 1.0) os << i << ',' << j << "\n";
}

inline Matrix read_mask(std::istream& in, std::size_t labels, std::size_t instances) {
    Matrix mask(labels, instances, 0.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = ioutil::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto parts = ioutil::split(view, ',');
        std::size_t i = 0;
        std::size_t j = 0;
        if (parts.size() != 2 || !ioutil::parse_size(ioutil::trim(parts[0]), i) ||
            !ioutil::parse_size(ioutil::trim(parts[1]), j))
            throw ParseError("expected 'label_idx,instance_idx'", line_no);
        if (i >= labels || j >= instances)
            throw RangeError("mask cell out of range at line " + std::to_string(line_no));
        mask(i, j) = 1.0;
    }
    return mask;
}

// Partition export: one `instance_idx,group_idx` line per instance.
inline void write_partition(std::ostream& os, const GroupPartition& part) {
    for (std::size_t j = 0; j < part.assignment.size(); ++j)
        os << j << ',' << part.assignment[j] << "\n";
}

inline GroupPartition read_partition(std::istream& in, std::size_t expected_instances) {
    std::vector<std::size_t> assignment(expected_instances, 0);
    std::vector<bool> seen(expected_instances, false);
    std::size_t max_group = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = ioutil::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto parts = ioutil::split(view, ',');
        std::size_t j = 0;
        std::size_t b = 0;
        if (parts.size() != 2 || !ioutil::parse_size(ioutil::trim(parts[0]), j) ||
            !ioutil::parse_size(ioutil::trim(parts[1]), b))
            throw ParseError("expected 'instance_idx,group_idx'", line_no);
        if (j >= expected_instances)
            throw RangeError("instance index out of range at line " + std::to_string(line_no));
        assignment[j] = b;
        seen[j] = true;
        max_group = std::max(max_group, b);
    }
    for (std::size_t j = 0; j < expected_instances; ++j)
        if (!seen[j]) throw ParseError("partition file misses instance " + std::to_string(j));
    return partition_from_assignment(std::move(assignment), max_group + 1);
}

// ---------------------------------------------------------------------------
inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

}  // namespace spmld
