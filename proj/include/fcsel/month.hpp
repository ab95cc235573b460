#pragma once

#include <charconv>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace fcsel {

/// A calendar month. Ordered by (year, month).
struct MonthIndex {
    int year = 1970;
    int month = 1;  // 1..12

    friend constexpr auto operator<=>(const MonthIndex&, const MonthIndex&) = default;

    /// Months since January of year 0; convenient for arithmetic.
    constexpr long serial() const { return static_cast<long>(year) * 12 + (month - 1); }

    static constexpr MonthIndex from_serial(long s) {
        long y = s >= 0 ? s / 12 : -((-s + 11) / 12);
        return MonthIndex{static_cast<int>(y), static_cast<int>(s - y * 12) + 1};
    }

    constexpr MonthIndex plus(long months) const { return from_serial(serial() + months); }
    constexpr MonthIndex next() const { return plus(1); }
    constexpr MonthIndex prev() const { return plus(-1); }

    /// Signed number of months from `from` to `to`.
    friend constexpr long months_between(const MonthIndex& from, const MonthIndex& to) {
        return to.serial() - from.serial();
    }

    std::string to_string() const {
        std::string out(7, '0');
        for (int i = 3, y = year; i >= 0; --i, y /= 10) out[static_cast<std::size_t>(i)] = static_cast<char>('0' + y % 10);
        out[4] = '-';
        out[5] = static_cast<char>('0' + month / 10);
        out[6] = static_cast<char>('0' + month % 10);
        return out;
    }

    /// Strict `YYYY-MM` parser; anything else yields nullopt.
    static std::optional<MonthIndex> parse(std::string_view text) {
        if (text.size() != 7 || text[4] != '-') return std::nullopt;
        for (std::size_t i = 0; i < 7; ++i) {
            if (i == 4) continue;
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
        }
        int y = 0, m = 0;
        std::from_chars(text.data(), text.data() + 4, y);
        std::from_chars(text.data() + 5, text.data() + 7, m);
        if (m < 1 || m > 12) return std::nullopt;
        return MonthIndex{y, m};
    }
};

}  // namespace fcsel
