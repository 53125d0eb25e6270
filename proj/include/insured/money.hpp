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

#ifndef INSURED_MONEY_HPP_
#define INSURED_MONEY_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace insured {

enum class MoneyErrc { kOverflow, kNegative, kParse, kInexact, kRoundingForbidden };

class MoneyError : public std::runtime_error {
 public:
  MoneyError(MoneyErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  MoneyErrc code() const noexcept { return code_; }

 private:
  MoneyErrc code_;
};

inline constexpr std::int64_t kMicrosPerUnit = 1'000'000;

// Checked int64 helpers; every overflow is reported, never wrapped.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

class SignedMoney;

// A non-negative amount in micro-units (1e-6 of a currency unit). Used for
// every stored balance, stake, bond, fee and premium.
class Money {
 public:
  constexpr Money() = default;

  static Money from_micros(std::int64_t micros);
  static Money units(std::int64_t whole_units);
  // Exact decimal parse ("12", "0.25", "3.000001"); negative input is an error.
  static Money parse(std::string_view text);

  constexpr std::int64_t micros() const noexcept { return micros_; }
  constexpr bool is_zero() const noexcept { return micros_ == 0; }

  Money& operator+=(Money other);
  // Throws kNegative if the result would drop below zero.
  Money& operator-=(Money other);

  friend Money operator+(Money a, Money b) { return a += b; }
  friend Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr auto operator<=>(Money, Money) = default;

  std::string to_string() const;

 private:
  constexpr explicit Money(std::int64_t micros) : micros_(micros) {}
  std::int64_t micros_ = 0;
};

// Signed micro-unit amount: payoffs, balance deltas and the honest-path payoff.
class SignedMoney {
 public:
  constexpr SignedMoney() = default;
  constexpr explicit SignedMoney(std::int64_t micros) : micros_(micros) {}
  constexpr SignedMoney(Money m) : micros_(m.micros()) {}  // NOLINT(implicit)

  static SignedMoney units(std::int64_t whole_units);
  static SignedMoney parse(std::string_view text);

  constexpr std::int64_t micros() const noexcept { return micros_; }

  SignedMoney& operator+=(SignedMoney other);
  SignedMoney& operator-=(SignedMoney other);
  SignedMoney operator-() const;

  friend SignedMoney operator+(SignedMoney a, SignedMoney b) { return a += b; }
  friend SignedMoney operator-(SignedMoney a, SignedMoney b) { return a -= b; }
  friend constexpr auto operator<=>(SignedMoney, SignedMoney) = default;

  std::string to_string() const;

 private:
  std::int64_t micros_ = 0;
};

// Parses a decimal currency amount into micro-units. More than six fractional
// digits is kInexact; malformed text is kParse.
std::int64_t parse_decimal_micros(std::string_view text);

// Canonical decimal rendering: no trailing zeros, no trailing dot ("12.5", "-3", "0").
std::string format_decimal_micros(std::int64_t micros);

}  // namespace insured

#endif  // INSURED_MONEY_HPP_
