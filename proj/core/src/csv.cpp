#include "redsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace redsim {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::optional<double>>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        if (cells[i] && std::isfinite(*cells[i])) os_ << format_number(*cells[i]);
    }
    os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        os_ << cells[i];
    }
    os_ << '\n';
}

}  // namespace redsim
