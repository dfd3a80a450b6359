#include "glmminimax/text_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <vector>

#include "glmminimax/error.hpp"

namespace glmminimax {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_token(std::string_view token, std::size_t row, std::size_t column) {
    token = trim(token);
    if (token.empty()) {
        throw ParseError(row, column, "empty field");
    }
    std::string_view digits = token;
    if (digits.front() == '+') {
        digits.remove_prefix(1);
    }
    double value = 0.0;
    const auto* begin = digits.data();
    const auto* end = digits.data() + digits.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(row, column, "not a decimal number: '" + std::string(token) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(row, column, "non-finite value: '" + std::string(token) + "'");
    }
    return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw PreconditionError("cannot open file: " + path.string());
    }
    return in;
}

}  // namespace

Eigen::MatrixXd parse_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view content = trim(line);
        if (content.empty() || content.front() == '#') {
            continue;
        }
        std::vector<double> values;
        std::size_t start = 0;
        std::size_t column = 1;
        while (true) {
            const auto comma = content.find(',', start);
            const auto field = content.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                     : comma - start);
            values.push_back(parse_token(field, line_no, column));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
            ++column;
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw ParseError(line_no, 0,
                             "ragged row: expected " + std::to_string(rows.front().size()) +
                                 " columns, found " + std::to_string(values.size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw ParseError(line_no == 0 ? 1 : line_no, 0, "empty input: no matrix rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

DesignSpec load_design(std::istream& in, RankPolicy policy) { return DesignSpec(parse_matrix(in), policy); }

DesignSpec load_design(const std::filesystem::path& path, RankPolicy policy) {
    auto in = open_or_throw(path);
    return load_design(in, policy);
}

Eigen::VectorXd load_vector(std::istream& in) {
    const Eigen::MatrixXd m = parse_matrix(in);
    if (m.rows() == 1) {
        return m.row(0).transpose();
    }
    if (m.cols() == 1) {
        return m.col(0);
    }
    throw ParseError(2, 0, "vector file must have a single row or a single column");
}

Eigen::VectorXd load_vector(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return load_vector(in);
}

std::string format_real(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    (void)ec;
    return std::string(buf, ptr);
}

std::string join_reals(const Eigen::VectorXd& values, std::string_view separator) {
    std::string out;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += separator;
        }
        out += format_real(values(i));
    }
    return out;
}

}  // namespace glmminimax
