#pragma once

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace starstar {

// Opaque text identifier, distinct per domain concept so that an EventId can
// never be passed where an ObjectId is expected.
template <typename Tag>
class Identifier {
public:
    Identifier() = default;
    explicit Identifier(std::string value) : value_(std::move(value)) {}
    explicit Identifier(std::string_view value) : value_(value) {}
    explicit Identifier(const char* value) : value_(value) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const Identifier&, const Identifier&) = default;
    friend bool operator==(const Identifier&, const Identifier&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Identifier& id) {
        return os << id.value_;
    }

private:
    std::string value_;
};

using EventId = Identifier<struct EventIdTag>;
using ObjectId = Identifier<struct ObjectIdTag>;
using ObjectClass = Identifier<struct ObjectClassTag>;
using Activity = Identifier<struct ActivityTag>;
using CaseId = Identifier<struct CaseIdTag>;

} // namespace starstar

template <typename Tag>
struct std::hash<starstar::Identifier<Tag>> {
    std::size_t operator()(const starstar::Identifier<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
