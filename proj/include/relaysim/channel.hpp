#pragma once

#include <string>

#include "relaysim/matrix.hpp"
#include "relaysim/rng.hpp"

namespace relaysim {

// One quasi-static fading block for an n-source, m-relay, n-destination
// network. Entries are i.i.d. unit-mean exponential power gains (Rayleigh
// amplitude fading).
//   gamma(i, r): source i  -> relay r,       n x m
//   xi(k, j):    relay k   -> destination j, m x n
struct ChannelRealization {
    Matrix gamma;
    Matrix xi;
    int n = 0;
    int m = 0;
};

// rows x cols i.i.d. Exp(1) gains drawn from gen, row-major draw order.
Matrix draw_gain_matrix(int rows, int cols, std::mt19937_64& gen);

// Draws gamma then xi from the single stream named by rng.
// Throws std::invalid_argument unless n >= 1 and m >= 1.
ChannelRealization draw_realization(int n, int m, const RngSpec& rng);

// Plain CSV, one matrix row per line, full round-trip precision.
void save_matrix_csv(const std::string& path, const Matrix& mat);

// Parses a rectangular CSV of strictly positive finite values.
// Throws std::runtime_error on ragged rows, bad numbers, or empty input.
Matrix load_matrix_csv(const std::string& path);

}  // namespace relaysim
