#include "mvfs/dataset.hpp"

#include "mvfs/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mvfs {

void validate(const MultiViewDataset& dataset) {
    if (dataset.views.empty()) throw InvalidArgument("dataset has no views");
    const auto n = dataset.views.front().data.rows();
    if (n < 2) throw InvalidArgument("dataset needs at least 2 instances");
    for (std::size_t v = 0; v < dataset.views.size(); ++v) {
        const auto& x = dataset.views[v].data;
        if (x.rows() != n) {
            throw InvalidArgument("view " + std::to_string(v + 1) + " has " + std::to_string(x.rows()) +
                                  " rows, expected " + std::to_string(n));
        }
        if (x.cols() < 1) throw InvalidArgument("view " + std::to_string(v + 1) + " has no features");
        if (!x.allFinite()) throw InvalidArgument("view " + std::to_string(v + 1) + " has non-finite entries");
    }
    if (dataset.has_labels() && static_cast<Eigen::Index>(dataset.labels.size()) != n) {
        throw InvalidArgument("label count " + std::to_string(dataset.labels.size()) + " does not match " +
                              std::to_string(n) + " instances");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::vector<std::string> read_lines(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    bool skip = header;
    while (std::getline(in, line)) {
        if (skip) {
            skip = false;
            continue;
        }
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path, bool header) {
    const auto lines = read_lines(path, header);
    if (lines.empty()) throw LoadError("'" + path + "' contains no data rows");
    const std::size_t row_offset = header ? 2 : 1;
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto cells = split(lines[r]);
        std::vector<double> values;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double value = 0.0;
            auto cell = cells[c];
            if (cell.size() > 1 && cell.front() == '+') cell.remove_prefix(1);
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
                throw ParseError("'" + path + "': non-numeric cell '" + std::string(cell) + "' at row " +
                                     std::to_string(r + row_offset) + ", column " + std::to_string(c + 1),
                                 r + row_offset, c + 1);
            }
            values.push_back(value);
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw ParseError("'" + path + "': row " + std::to_string(r + row_offset) + " has " +
                                 std::to_string(values.size()) + " columns, expected " +
                                 std::to_string(rows.front().size()),
                             r + row_offset, values.size());
        }
        rows.push_back(std::move(values));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

std::vector<std::string> read_label_column(const std::string& path, bool header) {
    const auto lines = read_lines(path, header);
    std::vector<std::string> labels;
    for (const auto& line : lines) labels.emplace_back(split(line).front());
    return labels;
}

MultiViewDataset load_dataset(const std::vector<std::string>& view_paths,
                              const std::optional<std::string>& label_path, bool header) {
    if (view_paths.empty()) throw InvalidArgument("at least one view file is required");
    MultiViewDataset ds;
    for (std::size_t v = 0; v < view_paths.size(); ++v) {
        Matrix x = read_csv_matrix(view_paths[v], header);
        if (!ds.views.empty() && x.rows() != ds.views.front().data.rows()) {
            throw LoadError("'" + view_paths[v] + "' has " + std::to_string(x.rows()) + " rows but '" +
                            view_paths.front() + "' has " + std::to_string(ds.views.front().data.rows()));
        }
        ds.views.push_back({std::move(x), static_cast<int>(v)});
    }
    if (label_path) {
        const auto ids = read_label_column(*label_path, header);
        if (static_cast<Eigen::Index>(ids.size()) != ds.views.front().data.rows()) {
            throw LoadError("'" + *label_path + "' has " + std::to_string(ids.size()) + " labels but the views have " +
                            std::to_string(ds.views.front().data.rows()) + " rows");
        }
        std::map<std::string, int> index;
        for (const auto& id : ids) {
            auto [it, inserted] = index.emplace(id, static_cast<int>(ds.class_names.size()));
            if (inserted) ds.class_names.push_back(id);
            ds.labels.push_back(it->second);
        }
    }
    if (ds.views.front().data.rows() < 2) throw LoadError("dataset needs at least 2 instances");
    return ds;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
    std::ostringstream s;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) s << (j ? "," : "") << format_double(m(i, j));
        s << '\n';
    }
    write_text(path, s.str());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write '" + path + "'");
    out << content;
    if (!out) throw LoadError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace mvfs
