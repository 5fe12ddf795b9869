#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "zo/errors.hpp"
#include "zo/problems.hpp"

namespace zo {

namespace {

// std::from_chars rejects a leading '+', which LIBSVM labels routinely carry.
bool parse_double(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_index(std::string_view tok, int& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string basename_stem(const std::string& path) {
    const auto slash = path.find_last_of("/\\");
    std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base;
}

}  // namespace

LibsvmData parse_libsvm(std::istream& in, const std::string& name,
                        const std::string& source_path) {
    LibsvmData out;
    out.matrix.row_offsets.push_back(0);
    out.meta.name = name;
    out.meta.source_path = source_path;

    std::vector<double> raw_labels;
    std::set<double> distinct;

    std::string line;
    std::size_t line_no = 0;
    int max_index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string tok;
        if (!(fields >> tok)) continue;  // blank line

        double label = 0.0;
        if (!parse_double(tok, label))
            throw ParseError("label is not a number: '" + tok + "'", line_no);
        distinct.insert(label);
        if (distinct.size() > 2)
            throw ParseError("more than two distinct label values", line_no);
        raw_labels.push_back(label);

        int prev_index = 0;
        while (fields >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
                throw ParseError("expected index:value pair, got '" + tok + "'", line_no);
            int index = 0;
            double value = 0.0;
            if (!parse_index(std::string_view(tok).substr(0, colon), index))
                throw ParseError("feature index is not an integer: '" + tok + "'", line_no);
            if (!parse_double(std::string_view(tok).substr(colon + 1), value))
                throw ParseError("feature value is not a number: '" + tok + "'", line_no);
            if (index < 1)
                throw ParseError("feature indices are 1-based, got " + std::to_string(index),
                                 line_no);
            if (index <= prev_index)
                throw ParseError("feature indices must be strictly increasing within a line",
                                 line_no);
            prev_index = index;
            max_index = std::max(max_index, index);
            out.matrix.col_indices.push_back(index - 1);
            out.matrix.values.push_back(value);
        }
        out.matrix.row_offsets.push_back(
            static_cast<std::int64_t>(out.matrix.values.size()));
    }

    if (raw_labels.empty()) throw ParseError("no data lines", line_no == 0 ? 1 : line_no);
    if (distinct.size() != 2)
        throw ParseError("expected two distinct label values, found " +
                             std::to_string(distinct.size()),
                         line_no);

    const double low = *distinct.begin();
    out.labels.resize(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i)
        out.labels[i] = (raw_labels[i] == low) ? -1.0 : 1.0;

    out.matrix.rows = static_cast<int>(raw_labels.size());
    out.matrix.cols = max_index;
    out.meta.M = out.matrix.rows;
    out.meta.d = out.matrix.cols;
    return out;
}

LibsvmData parse_libsvm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open dataset file: " + path);
    return parse_libsvm(in, basename_stem(path), path);
}

void serialize_libsvm(const SparseMatrix& matrix, const Vec& labels, std::ostream& out) {
    if (static_cast<int>(labels.size()) != matrix.rows)
        throw UsageError("serialize_libsvm label count does not match matrix rows");
    char buf[64];
    for (int r = 0; r < matrix.rows; ++r) {
        std::snprintf(buf, sizeof(buf), "%+g", labels[static_cast<std::size_t>(r)]);
        out << buf;
        for (std::int64_t k = matrix.row_offsets[static_cast<std::size_t>(r)];
             k < matrix.row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), " %d:%.17g",
                          matrix.col_indices[static_cast<std::size_t>(k)] + 1,
                          matrix.values[static_cast<std::size_t>(k)]);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace zo
