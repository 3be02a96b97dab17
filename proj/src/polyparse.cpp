#include "quadsurf/polyparse.hpp"

#include <cctype>
#include <sstream>

namespace quadsurf {

ParseError::ParseError(std::size_t position, std::string expected, std::string found)
    : std::runtime_error("parse error at offset " + std::to_string(position) + ": expected " + expected +
                         ", found " + found),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    std::size_t pos() const { return pos_; }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }

    std::string token_at(std::size_t at) const {
        if (at >= s_.size()) return "end of input";
        auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
        std::size_t end = at;
        if (is_word(s_[at])) {
            while (end < s_.size() && is_word(s_[end])) ++end;
        } else {
            end = at + 1;
        }
        return "'" + std::string(s_.substr(at, end - at)) + "'";
    }

    [[noreturn]] void fail(std::size_t at, const std::string &expected) const {
        throw ParseError(at, expected, token_at(at));
    }

    void expect(char c, const std::string &what) {
        skip_ws();
        if (peek() != c) fail(pos_, what);
        ++pos_;
    }

    // Sum of terms; stops before `stop` (or at end of input).
    Mat3 expression(char stop) {
        Mat3 acc = zero3();
        bool first = true;
        skip_ws();
        for (;;) {
            int sign = 1;
            bool had_sign = false;
            while (peek() == '+' || peek() == '-') {
                if (peek() == '-') sign = -sign;
                had_sign = true;
                ++pos_;
                skip_ws();
            }
            if (!first && !had_sign) fail(pos_, "'+' or '-'");
            term(sign, acc);
            first = false;
            skip_ws();
            if (at_end() || (stop != '\0' && peek() == stop)) return acc;
        }
    }

private:
    Integer integer() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail(pos_, "integer");
        return Integer(std::string(s_.substr(start, pos_ - start)), 10);
    }

    Rational coefficient() {
        Integer num = integer();
        std::size_t save = pos_;
        skip_ws();
        if (peek() != '/') {
            pos_ = save;
            return Rational(num);
        }
        ++pos_;
        skip_ws();
        std::size_t den_at = pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(pos_, "positive integer denominator");
        Integer den = integer();
        if (den == 0) fail(den_at, "positive integer denominator");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    // Parses var ['^' integer]; adds the exponent to `degree`.
    void factor(std::array<Integer, 3> &degree) {
        std::size_t at = pos_;
        if (peek() != 'x') fail(at, "variable x1, x2 or x3");
        std::size_t end = at + 1;
        while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
        std::string_view name = s_.substr(at, end - at);
        if (name != "x1" && name != "x2" && name != "x3") fail(at, "variable x1, x2 or x3");
        int var = name[1] - '1';
        pos_ = end;
        std::size_t save = pos_;
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(pos_, "integer exponent");
            degree[var] += integer();
        } else {
            pos_ = save;
            degree[var] += 1;
        }
    }

    void term(int sign, Mat3 &acc) {
        std::size_t start = pos_;
        Rational c = sign;
        bool has_coeff = false;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            c *= coefficient();
            has_coeff = true;
            std::size_t save = pos_;
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                skip_ws();
                if (peek() != 'x') fail(pos_, "variable x1, x2 or x3");
            } else if (peek() != 'x') {
                pos_ = save;
            }
        }
        std::array<Integer, 3> degree{0, 0, 0};
        bool has_monomial = false;
        if (peek() == 'x') {
            has_monomial = true;
            factor(degree);
            for (;;) {
                std::size_t save = pos_;
                skip_ws();
                if (peek() != '*') {
                    pos_ = save;
                    break;
                }
                ++pos_;
                skip_ws();
                factor(degree);
            }
        } else if (!has_coeff) {
            fail(pos_, "coefficient or variable");
        }
        Integer total = degree[0] + degree[1] + degree[2];
        std::string text(s_.substr(start, pos_ - start));
        if (!has_monomial) {
            if (c != 0) throw DegreeError(start, "monomial of degree 2", "constant '" + text + "'");
            return;
        }
        if (total != 2)
            throw DegreeError(start, "monomial of degree 2",
                              "degree " + total.get_str() + " term '" + text + "'");
        int i = -1, j = -1;
        for (int v = 0; v < 3; ++v)
            for (Integer k = 0; k < degree[v]; ++k) (i < 0 ? i : j) = v;
        if (i == j) {
            acc[i][i] += c;
        } else {
            Rational half = c / 2;
            acc[i][j] += half;
            acc[j][i] += half;
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

QuadraticForm parse_form(std::string_view text) {
    Parser p(text);
    Mat3 m = p.expression('\0');
    return QuadraticForm(m);
}

QuadPair parse_pair(std::string_view text) {
    Parser p(text);
    p.skip_ws();
    if (p.peek() == 'Q') throw MissingComponent(p.pos(), "'P = <expression>' first", "'Q'");
    if (p.at_end()) throw MissingComponent(p.pos(), "'P = <expression>'", "end of input");
    p.expect('P', "'P'");
    p.expect('=', "'='");
    QuadraticForm pf(p.expression(';'));
    p.skip_ws();
    if (p.at_end()) throw MissingComponent(p.pos(), "'; Q = <expression>'", "end of input");
    p.expect(';', "';'");
    p.skip_ws();
    if (p.at_end()) throw MissingComponent(p.pos(), "'Q = <expression>'", "end of input");
    p.expect('Q', "'Q'");
    p.expect('=', "'='");
    QuadraticForm qf(p.expression(';'));
    p.skip_ws();
    if (p.peek() == ';') {
        p.expect(';', "';'");
        p.skip_ws();
    }
    if (!p.at_end()) p.fail(p.pos(), "end of input");
    return {pf, qf};
}

std::vector<QuadPair> parse_pair_file(std::string_view contents) {
    std::vector<QuadPair> out;
    std::size_t line_start = 0;
    while (line_start <= contents.size()) {
        std::size_t nl = contents.find('\n', line_start);
        std::size_t line_end = nl == std::string_view::npos ? contents.size() : nl;
        std::string_view line = contents.substr(line_start, line_end - line_start);
        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (!blank) {
            try {
                out.push_back(parse_pair(line));
            } catch (const DegreeError &e) {
                throw DegreeError(line_start + e.position(), e.expected(), e.found());
            } catch (const MissingComponent &e) {
                throw MissingComponent(line_start + e.position(), e.expected(), e.found());
            } catch (const ParseError &e) {
                throw ParseError(line_start + e.position(), e.expected(), e.found());
            }
        }
        if (nl == std::string_view::npos) break;
        line_start = nl + 1;
    }
    return out;
}

std::string format_form(const QuadraticForm &form) {
    static const int index[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    static const char *mono[6] = {"x1^2", "x2^2", "x3^2", "x1*x2", "x1*x3", "x2*x3"};
    const Mat3 &m = form.coeff();
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k < 6; ++k) {
        int i = index[k][0], j = index[k][1];
        Rational c = i == j ? m[i][i] : Rational(2 * m[i][j]);
        if (c == 0) continue;
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        Rational mag = abs(c);
        if (mag != 1) os << mag.get_str() << "*";
        os << mono[k];
        first = false;
    }
    return first ? "0" : os.str();
}

std::string format_pair(const QuadPair &pair) {
    return "P = " + format_form(pair.p) + "; Q = " + format_form(pair.q);
}

}  // namespace quadsurf
