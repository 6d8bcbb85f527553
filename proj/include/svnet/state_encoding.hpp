#ifndef SVNET_STATE_ENCODING_HPP
#define SVNET_STATE_ENCODING_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svnet/types.hpp"

namespace svn {

// Daily trading state: primarily buying, primarily selling, or mixed
// buy-and-sell (day trading). Inactive days carry no state at all.
enum class TradingState : std::uint8_t { buy = 0, sell = 1, buy_sell = 2 };

inline constexpr int kStateCount = 3;

std::string_view to_string(TradingState s);
TradingState parse_state(std::string_view token);

struct EncoderConfig {
    double theta = 0.25;      // in (0, 1)
    int min_active_days = 5;  // >= 1

    void validate() const;
};

// Scaled net volume ratio (buy - sell) / (buy + sell) in [-1, 1].
// Throws DataError when both volumes are zero: the ratio is undefined and no
// state may be assigned.
double scaled_net_ratio(std::int64_t total_buy, std::int64_t total_sell);

// buy when r > theta, sell when r < -theta, mixed on [-theta, theta]
// (boundary values are mixed).
TradingState assign_state(double r, double theta);

// Threshold comparison on integer volumes. When theta is representable as a
// small rational the comparison is done by exact cross-multiplication so a
// boundary day can never be misclassified by floating-point rounding.
class ThetaThreshold {
public:
    explicit ThetaThreshold(double theta);

    TradingState classify(std::int64_t total_buy, std::int64_t total_sell) const;
    double value() const { return theta_; }
    bool exact() const { return exact_; }

private:
    double theta_;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    bool exact_ = false;
};

// Per-security, per-window categorical trading states. Days are indices into
// `trading_days` (the security's trade dates inside the window); rows are
// ordered by investor id and each row's days are strictly increasing.
struct StateMatrix {
    struct Row {
        std::string investor_id;
        std::vector<std::pair<std::int32_t, TradingState>> days;

        int activity_days() const { return static_cast<int>(days.size()); }
    };

    std::string security_id;
    Window window;
    std::vector<Date> trading_days;
    std::vector<Row> rows;

    const Row* find(std::string_view investor_id) const;
};

// Assigns one state per active (investor, day) inside the window; volume
// records outside the window are dropped. `daily` must already be restricted
// to one security.
StateMatrix encode(std::span<const DailyNetVolume> daily, const EncoderConfig& cfg,
                   const Window& window, const SecurityCalendar& calendar);

// Keeps investors with at least `min_days` active days in either window;
// both matrices are filtered to the same retained investor set.
std::pair<StateMatrix, StateMatrix> filter_active(const StateMatrix& y1,
                                                  const StateMatrix& y2, int min_days);

// Debug / oracle export: investor_id,date,state
void write_state_matrix_csv(const StateMatrix& m, std::ostream& out);

}  // namespace svn

#endif  // SVNET_STATE_ENCODING_HPP
