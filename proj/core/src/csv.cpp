#include "convbound/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace convbound {

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << fields[i];
    }
    out << '\n';
}

void write_csv_matrix(std::ostream& out, const DenseMatrix& m) {
    std::vector<std::string> row(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        row[j] = "c" + std::to_string(j);
    }
    write_csv_row(out, row);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row[j] = format_full(m(i, j));
        }
        write_csv_row(out, row);
    }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.push_back("");
    }
    return out;
}

bool parse_double(const std::string& text, double& value) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    value = std::strtod(begin, &end);
    while (end && *end == ' ') {
        ++end;
    }
    return end != begin && end && *end == '\0' && errno == 0;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

}  // namespace

DenseMatrix read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_double(fields[j], row[j])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header row
            }
            throw ParseError(path.string() + ": non-numeric row '" + line + "'");
        }
        first = false;
        if (!rows.empty() && row.size() != rows[0].size()) {
            throw ParseError(path.string() + ": ragged row with " +
                             std::to_string(row.size()) + " fields");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError(path.string() + ": no numeric rows");
    }
    DenseMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(i, j) = rows[i][j];
        }
    }
    return m;
}

std::vector<std::size_t> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::size_t> labels;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        char* end = nullptr;
        const long v = std::strtol(line.c_str(), &end, 10);
        if (end == line.c_str() || *end != '\0' || v < 1) {
            throw ParseError(path.string() + ": bad label '" + line + "'");
        }
        labels.push_back(static_cast<std::size_t>(v));
    }
    if (labels.empty()) {
        throw ParseError(path.string() + ": no labels");
    }
    return labels;
}

}  // namespace convbound
