#include "medpool/stats.hpp"

#include <stdexcept>

namespace medpool::stats {

double bowley_skewness(double q1, double q2, double q3) {
    if (!(q1 <= q2 && q2 <= q3)) {
        throw std::invalid_argument("bowley_skewness: quartiles must satisfy q1 <= q2 <= q3");
    }
    if (q3 == q1) {
        throw std::domain_error("bowley_skewness: zero interquartile range");
    }
    return (q1 - 2.0 * q2 + q3) / (q3 - q1);
}

SkewLevel classify_skew(double skb) {
    if (skb <= 0.1) return SkewLevel::Low;
    if (skb <= 0.2) return SkewLevel::Medium;
    if (skb <= 0.4) return SkewLevel::High;
    return SkewLevel::VeryHigh;
}

std::string_view to_string(SkewLevel level) {
    switch (level) {
        case SkewLevel::Low: return "low";
        case SkewLevel::Medium: return "medium";
        case SkewLevel::High: return "high";
        case SkewLevel::VeryHigh: return "very_high";
    }
    return "unknown";
}

std::optional<SkewLevel> parse_skew_level(std::string_view text) {
    for (SkewLevel level : kSkewLevels) {
        if (to_string(level) == text) return level;
    }
    return std::nullopt;
}

}  // namespace medpool::stats
