#include "starstar/timefmt.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace starstar {

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ == s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }

    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    // Exactly `n` digits.
    std::optional<int> digits(std::size_t n) {
        if (s_.size() - pos_ < n) {
            return std::nullopt;
        }
        int value = 0;
        for (std::size_t i = 0; i < n; ++i) {
            char c = s_[pos_ + i];
            if (c < '0' || c > '9') {
                return std::nullopt;
            }
            value = value * 10 + (c - '0');
        }
        pos_ += n;
        return value;
    }

    // Fraction of a second after the '.', returned in milliseconds (truncated).
    std::optional<int> fraction_millis() {
        std::size_t start = pos_;
        int millis = 0;
        std::size_t n = 0;
        while (!done() && peek() >= '0' && peek() <= '9') {
            if (n < 3) {
                millis = millis * 10 + (peek() - '0');
            }
            ++n;
            ++pos_;
        }
        if (pos_ == start) {
            return std::nullopt;
        }
        for (; n < 3; ++n) {
            millis *= 10;
        }
        return millis;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    Cursor in(text);
    auto y = in.digits(4);
    if (!y || !in.eat('-')) return std::nullopt;
    auto mo = in.digits(2);
    if (!mo || !in.eat('-')) return std::nullopt;
    auto d = in.digits(2);
    if (!d) return std::nullopt;

    year_month_day date{year{*y}, month{static_cast<unsigned>(*mo)},
                        day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;

    int hh = 0, mm = 0, ss = 0, ms = 0;
    if (in.eat('T') || in.eat(' ')) {
        auto h = in.digits(2);
        if (!h || !in.eat(':')) return std::nullopt;
        auto m = in.digits(2);
        if (!m) return std::nullopt;
        hh = *h;
        mm = *m;
        if (in.eat(':')) {
            auto s = in.digits(2);
            if (!s) return std::nullopt;
            ss = *s;
            if (in.eat('.') || in.eat(',')) {
                auto f = in.fraction_millis();
                if (!f) return std::nullopt;
                ms = *f;
            }
        }
        if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    }

    int offset_minutes = 0;
    bool utc = in.eat('Z') || in.eat('z');
    if (!utc && (in.peek() == '+' || in.peek() == '-')) {
        int sign = in.peek() == '-' ? -1 : 1;
        in.eat(in.peek());
        auto oh = in.digits(2);
        if (!oh) return std::nullopt;
        in.eat(':');
        auto om = in.digits(2);
        if (!om) return std::nullopt;
        offset_minutes = sign * (*oh * 60 + *om);
    }
    if (!in.done()) return std::nullopt;

    auto tp = sys_days{date} + hours{hh} + minutes{mm - offset_minutes} + seconds{ss} +
              milliseconds{ms};
    return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    Timestamp value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) {
        return value;
    }
    return parse_iso8601(text);
}

std::string format_iso8601(Timestamp millis) {
    using namespace std::chrono;
    sys_time<milliseconds> tp{milliseconds{millis}};
    auto day_point = floor<days>(tp);
    year_month_day date{day_point};
    hh_mm_ss<milliseconds> tod{tp - day_point};

    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(date.year()), static_cast<unsigned>(date.month()),
                  static_cast<unsigned>(date.day()), static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()),
                  static_cast<int>(tod.subseconds().count()));
    return buf;
}

} // namespace starstar
