#include "dfdr/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_map>

#include "dfdr/error.hpp"

namespace dfdr {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        cells.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return cells;
}

void chomp(std::string& line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
}

double parse_cell(std::string_view cell, std::size_t line) {
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ParseError("non-numeric cell '" + std::string(cell) + "'", line);
    return value;
}

template <typename Ids>
void require_unique(const Ids& ids, const char* kind) {
    std::set<std::string_view> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) throw ValidationError(std::string("duplicate ") + kind + " ID '" + id + "'");
}

double median_of(Eigen::VectorXd column) {
    auto* begin = column.data();
    auto* end = begin + column.size();
    auto* mid = begin + column.size() / 2;
    std::nth_element(begin, mid, end);
    if (column.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(begin, mid);
    return lower + (upper - lower) / 2.0;
}

}  // namespace

std::vector<Index> DataMatrix::columns_in(std::string_view group) const {
    std::vector<Index> columns;
    for (std::size_t j = 0; j < labels.size(); ++j)
        if (labels[j] == group) columns.push_back(static_cast<Index>(j));
    return columns;
}

std::map<std::string, Index> DataMatrix::group_sizes() const {
    std::map<std::string, Index> sizes;
    for (const auto& label : labels) ++sizes[label];
    return sizes;
}

void DataMatrix::validate() const {
    if (values.rows() < 1) throw ValidationError("matrix has no features");
    if (values.cols() < 2) throw ValidationError("matrix needs at least two subjects");
    if (static_cast<Index>(feature_ids.size()) != values.rows() ||
        static_cast<Index>(subject_ids.size()) != values.cols() ||
        static_cast<Index>(labels.size()) != values.cols())
        throw ValidationError("matrix dimensions disagree with ID or label counts");
    require_unique(feature_ids, "feature");
    require_unique(subject_ids, "subject");
}

DataMatrix read_matrix(std::istream& matrix_in, std::istream& labels_in) {
    std::unordered_map<std::string, std::string> label_of;
    {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(labels_in, line)) {
            ++line_no;
            chomp(line);
            if (line.empty()) continue;
            const auto cells = split_tabs(line);
            if (cells.size() != 2 || cells[0].empty() || cells[1].empty())
                throw ParseError("labels file needs exactly two columns (subject, group)", line_no);
            if (!label_of.emplace(std::string(cells[0]), std::string(cells[1])).second)
                throw ValidationError("duplicate subject ID '" + std::string(cells[0]) + "' in labels file");
        }
    }

    DataMatrix result;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(matrix_in, line)) throw ParseError("matrix file is empty");
    ++line_no;
    chomp(line);
    const auto header = split_tabs(line);
    if (header.size() < 2) throw ParseError("header row has no subject columns", line_no);
    for (std::size_t j = 1; j < header.size(); ++j) result.subject_ids.emplace_back(header[j]);
    const auto n = result.subject_ids.size();

    std::vector<double> cells;
    while (std::getline(matrix_in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        const auto row = split_tabs(line);
        if (row.size() != n + 1)
            throw ParseError("expected " + std::to_string(n + 1) + " cells, found " + std::to_string(row.size()),
                             line_no);
        result.feature_ids.emplace_back(row[0]);
        for (std::size_t j = 1; j < row.size(); ++j) cells.push_back(parse_cell(row[j], line_no));
    }

    const auto m = static_cast<Index>(result.feature_ids.size());
    result.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cells.data(), m, static_cast<Index>(n));

    for (const auto& subject : result.subject_ids) {
        const auto it = label_of.find(subject);
        if (it == label_of.end()) throw ValidationError("no label for subject '" + subject + "'");
        result.labels.push_back(it->second);
    }
    result.validate();
    return result;
}

DataMatrix load_matrix(const std::filesystem::path& matrix, const std::filesystem::path& labels) {
    std::ifstream matrix_in(matrix);
    if (!matrix_in) throw ParseError("cannot open matrix file " + matrix.string());
    std::ifstream labels_in(labels);
    if (!labels_in) throw ParseError("cannot open labels file " + labels.string());
    return read_matrix(matrix_in, labels_in);
}

DataMatrix select_features(const DataMatrix& matrix, std::span<const Index> rows) {
    DataMatrix subset;
    subset.values = matrix.values(std::vector<Index>(rows.begin(), rows.end()), Eigen::all);
    for (const auto r : rows) subset.feature_ids.push_back(matrix.feature_ids.at(static_cast<std::size_t>(r)));
    subset.subject_ids = matrix.subject_ids;
    subset.labels = matrix.labels;
    return subset;
}

DataMatrix preprocess(DataMatrix matrix) {
    for (Index j = 0; j < matrix.subjects(); ++j) {
        const double median = median_of(matrix.values.col(j));
        if (median == 0.0)
            throw PreprocessError("subject '" + matrix.subject_ids[static_cast<std::size_t>(j)] +
                                  "' has a zero median; cannot normalize");
        matrix.values.col(j) = signed_log1p((matrix.values.col(j) / median).array()).matrix();
    }
    return matrix;
}

}  // namespace dfdr
