#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace kgedmd {

// Binary layout: "KGDM", u32 rows, u32 cols (little endian), then rows*cols row-major f64.
inline void write_kgdm(const std::string& path, const Eigen::MatrixXd& A) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path + " for writing");
    const std::uint32_t r = static_cast<std::uint32_t>(A.rows()), c = static_cast<std::uint32_t>(A.cols());
    f.write("KGDM", 4);
    f.write(reinterpret_cast<const char*>(&r), 4);
    f.write(reinterpret_cast<const char*>(&c), 4);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = A;
    f.write(reinterpret_cast<const char*>(R.data()), static_cast<std::streamsize>(sizeof(double) * R.size()));
    if (!f) throw InputError("write failed: " + path);
}

inline Eigen::MatrixXd read_kgdm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path);
    char magic[4];
    std::uint32_t r = 0, c = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&r), 4);
    f.read(reinterpret_cast<char*>(&c), 4);
    if (!f || std::memcmp(magic, "KGDM", 4) != 0) throw InputError("not a KGDM matrix file: " + path);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R(r, c);
    f.read(reinterpret_cast<char*>(R.data()), static_cast<std::streamsize>(sizeof(double) * R.size()));
    if (!f) throw InputError("truncated KGDM matrix file: " + path);
    return R;
}

inline void write_csv(std::ostream& os, const Eigen::MatrixXd& A, const std::vector<std::string>& header = {}) {
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    if (!header.empty()) os << "\n";
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) os << (j ? "," : "") << A(i, j);
        os << "\n";
    }
}

inline void write_csv(const std::string& path, const Eigen::MatrixXd& A, const std::vector<std::string>& header = {}) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot open " + path + " for writing");
    write_csv(f, A, header);
}

// Numeric CSV with an optional single header line.
inline Eigen::MatrixXd read_csv(const std::string& path, std::vector<std::string>* header = nullptr) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            first = false;
            char* end = nullptr;
            std::strtod(cells.front().c_str(), &end);
            if (end == cells.front().c_str()) {
                if (header) *header = cells;
                continue;
            }
        }
        std::vector<double> r;
        for (auto& s : cells) r.push_back(std::stod(s));
        if (!rows.empty() && r.size() != rows.front().size()) throw InputError("ragged CSV: " + path);
        rows.push_back(std::move(r));
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return A;
}

}  // namespace kgedmd
