#include "relaysim/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace relaysim {

Matrix draw_gain_matrix(int rows, int cols, std::mt19937_64& gen) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("gain matrix needs rows >= 1 and cols >= 1");
    Matrix mat(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    double* p = mat.data();
    const std::size_t count = mat.rows() * mat.cols();
    for (std::size_t idx = 0; idx < count; ++idx) p[idx] = exp1(gen);
    return mat;
}

ChannelRealization draw_realization(int n, int m, const RngSpec& rng) {
    if (n < 1 || m < 1)
        throw std::invalid_argument("draw_realization needs n >= 1 and m >= 1");
    std::mt19937_64 gen = make_stream(rng);
    ChannelRealization real;
    real.n = n;
    real.m = m;
    real.gamma = draw_gain_matrix(n, m, gen);
    real.xi = draw_gain_matrix(m, n, gen);
    return real;
}

void save_matrix_csv(const std::string& path, const Matrix& mat) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    // First line records the dimensions; %.17g round-trips doubles exactly.
    out << mat.rows() << ',' << mat.cols() << '\n';
    char buf[40];
    for (std::size_t i = 0; i < mat.rows(); ++i) {
        for (std::size_t j = 0; j < mat.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", mat(i, j));
            out << buf << (j + 1 < mat.cols() ? "," : "");
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    auto parse_fields = [&path](const std::string& line) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.empty()) throw std::runtime_error("empty line in " + path);
        return fields;
    };

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    auto header = parse_fields(line);
    if (header.size() != 2)
        throw std::runtime_error("expected 'rows,cols' header in " + path);
    std::size_t rows = 0;
    std::size_t cols = 0;
    try {
        rows = std::stoul(header[0]);
        cols = std::stoul(header[1]);
    } catch (const std::exception&) {
        throw std::runtime_error("bad dimension header in " + path);
    }
    if (rows < 1 || cols < 1)
        throw std::runtime_error("degenerate dimensions in " + path);

    Matrix mat(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("missing row " + std::to_string(i) + " in " + path);
        auto fields = parse_fields(line);
        if (fields.size() != cols)
            throw std::runtime_error("ragged row " + std::to_string(i) + " in " + path);
        for (std::size_t j = 0; j < cols; ++j) {
            double value = 0.0;
            std::size_t used = 0;
            try {
                value = std::stod(fields[j], &used);
            } catch (const std::exception&) {
                throw std::runtime_error("bad number '" + fields[j] + "' in " + path);
            }
            if (used != fields[j].size())
                throw std::runtime_error("bad number '" + fields[j] + "' in " + path);
            if (!(value > 0.0) || !std::isfinite(value))
                throw std::runtime_error("gains must be positive and finite: " + path);
            mat(i, j) = value;
        }
    }
    return mat;
}

}  // namespace relaysim
