// Copyright 2026 The Insured Agents Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "insured/money.hpp"

#include <cctype>
#include <string>

namespace insured {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw MoneyError(MoneyErrc::kOverflow, "money overflow in addition");
  }
  return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_sub_overflow(a, b, &out)) {
    throw MoneyError(MoneyErrc::kOverflow, "money overflow in subtraction");
  }
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw MoneyError(MoneyErrc::kOverflow, "money overflow in multiplication");
  }
  return out;
}

Money Money::from_micros(std::int64_t micros) {
  if (micros < 0) {
    throw MoneyError(MoneyErrc::kNegative,
                     "negative amount " + format_decimal_micros(micros));
  }
  return Money(micros);
}

Money Money::units(std::int64_t whole_units) {
  return from_micros(checked_mul(whole_units, kMicrosPerUnit));
}

Money Money::parse(std::string_view text) {
  return from_micros(parse_decimal_micros(text));
}

Money& Money::operator+=(Money other) {
  micros_ = checked_add(micros_, other.micros_);
  return *this;
}

Money& Money::operator-=(Money other) {
  if (other.micros_ > micros_) {
    throw MoneyError(MoneyErrc::kNegative, "money subtraction below zero");
  }
  micros_ -= other.micros_;
  return *this;
}

std::string Money::to_string() const { return format_decimal_micros(micros_); }

SignedMoney SignedMoney::units(std::int64_t whole_units) {
  return SignedMoney(checked_mul(whole_units, kMicrosPerUnit));
}

SignedMoney SignedMoney::parse(std::string_view text) {
  return SignedMoney(parse_decimal_micros(text));
}

SignedMoney& SignedMoney::operator+=(SignedMoney other) {
  micros_ = checked_add(micros_, other.micros_);
  return *this;
}

SignedMoney& SignedMoney::operator-=(SignedMoney other) {
  micros_ = checked_sub(micros_, other.micros_);
  return *this;
}

SignedMoney SignedMoney::operator-() const {
  return SignedMoney(checked_sub(0, micros_));
}

std::string SignedMoney::to_string() const {
  return format_decimal_micros(micros_);
}

std::int64_t parse_decimal_micros(std::string_view text) {
  const std::string original(text);
  auto fail = [&](MoneyErrc code, const char* why) {
    return MoneyError(code, std::string(why) + ": '" + original + "'");
  };
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) throw fail(MoneyErrc::kParse, "empty amount");

  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw fail(MoneyErrc::kParse, "no digits");
  if (dot != std::string_view::npos && frac.empty()) {
    throw fail(MoneyErrc::kParse, "trailing decimal point");
  }
  for (char c : whole) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw fail(MoneyErrc::kParse, "invalid character in amount");
    }
  }
  for (char c : frac) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw fail(MoneyErrc::kParse, "invalid character in amount");
    }
  }

  // Trailing zeros beyond six places are exact ("1.50000000" is fine).
  std::string_view significant = frac;
  while (significant.size() > 6 && significant.back() == '0') {
    significant.remove_suffix(1);
  }
  if (significant.size() > 6) {
    throw fail(MoneyErrc::kInexact, "more than 6 decimal places");
  }

  std::int64_t value = 0;
  for (char c : whole) value = checked_add(checked_mul(value, 10), c - '0');
  value = checked_mul(value, kMicrosPerUnit);
  std::int64_t scale = kMicrosPerUnit;
  for (char c : significant) {
    scale /= 10;
    value = checked_add(value, (c - '0') * scale);
  }
  return negative ? checked_sub(0, value) : value;
}

std::string format_decimal_micros(std::int64_t micros) {
  const bool negative = micros < 0;
  // Work in unsigned so INT64_MIN renders correctly.
  const std::uint64_t mag = negative ? ~static_cast<std::uint64_t>(micros) + 1
                                     : static_cast<std::uint64_t>(micros);
  std::string out = negative ? "-" : "";
  out += std::to_string(mag / kMicrosPerUnit);
  std::uint64_t frac = mag % kMicrosPerUnit;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

}  // namespace insured
