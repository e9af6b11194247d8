#include "threepc/bignum.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace threepc {

BigInt pow16(std::size_t exponent)
{
    BigInt result = 1;
    result <<= 4 * exponent;
    return result;
}

double to_double(const Rational& value)
{
    return Float50(value).convert_to<double>();
}

double to_double(const BigInt& value)
{
    return Float50(value).convert_to<double>();
}

double log_of(const Rational& value)
{
    if (value <= 0)
        throw std::domain_error("log_of: non-positive argument");
    return boost::multiprecision::log(Float50(value)).convert_to<double>();
}

std::string to_decimal(const BigInt& value)
{
    return value.str();
}

std::string format_real(const Rational& value, int digits)
{
    const Float50 f(value);
    const Float50 magnitude = boost::multiprecision::abs(f);
    std::ostringstream out;
    if (magnitude != 0 && (magnitude >= Float50(1e15) || magnitude < Float50(1e-4)))
        out << std::scientific << std::setprecision(digits - 1) << f;
    else
        out << std::setprecision(digits) << f;
    return out.str();
}

Rational parse_decimal(std::string_view text)
{
    const auto bad = [&] { return std::invalid_argument("malformed decimal: '" + std::string(text) + "'"); };
    if (text.empty())
        throw bad();

    std::size_t pos = 0;
    BigInt mantissa = 0;
    long scale = 0;
    bool any_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
    {
        mantissa = mantissa * 10 + (text[pos++] - '0');
        any_digit = true;
    }
    if (pos < text.size() && text[pos] == '.')
    {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
        {
            mantissa = mantissa * 10 + (text[pos++] - '0');
            --scale;
            any_digit = true;
        }
    }
    if (!any_digit)
        throw bad();
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E'))
    {
        ++pos;
        bool negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
            negative = text[pos++] == '-';
        long exponent = 0;
        bool exponent_digit = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
        {
            exponent = exponent * 10 + (text[pos++] - '0');
            exponent_digit = true;
            if (exponent > 100000)
                throw bad();
        }
        if (!exponent_digit)
            throw bad();
        scale += negative ? -exponent : exponent;
    }
    if (pos != text.size())
        throw bad();

    BigInt power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    if (scale >= 0)
        return Rational(mantissa * power);
    return Rational(mantissa, power);
}

BigInt parse_bigint(std::string_view text)
{
    if (text.empty())
        throw std::invalid_argument("empty integer");
    BigInt value = 0;
    for (char c : text)
    {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("malformed integer: '" + std::string(text) + "'");
        value = value * 10 + (c - '0');
    }
    return value;
}

} // namespace threepc
