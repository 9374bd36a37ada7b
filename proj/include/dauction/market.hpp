#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dauction {

enum class Side { buyer, seller };

const char* to_string(Side side);

struct BidProfile {
  std::vector<double> buyer_bids;
  std::vector<double> seller_bids;

  bool operator==(const BidProfile&) const = default;
};

// Result of one clearing. Participant id lists are sorted ascending.
// In fixed-price mode the two lists may differ in size and k is the buyer count.
struct RoundOutcome {
  std::size_t k = 0;
  std::optional<double> price;
  std::vector<std::size_t> participating_buyers;
  std::vector<std::size_t> participating_sellers;
  BidProfile bids;

  bool buyer_participates(std::size_t id) const;
  bool seller_participates(std::size_t id) const;

  bool operator==(const RoundOutcome&) const = default;
};

// True valuations plus what the average mechanism does with them.
struct ValuationProfile {
  std::vector<double> buyer_values;
  std::vector<double> seller_values;

  std::size_t k_star = 0;
  std::optional<double> p_star;
  std::vector<std::size_t> optimal_buyers;
  std::vector<std::size_t> optimal_sellers;
  std::optional<double> delta;

  // Buyer ids by value descending, seller ids by value ascending; ties by id.
  // rank_order[r] is the agent holding rank r+1 (so rank_order[k_star-1] is the price setter).
  std::vector<std::size_t> buyer_rank_order;
  std::vector<std::size_t> seller_rank_order;

  bool is_optimal_buyer(std::size_t id) const;
  bool is_optimal_seller(std::size_t id) const;
  std::size_t n_buyers() const { return buyer_values.size(); }
  std::size_t m_sellers() const { return seller_values.size(); }

  // Values in rank order: B_1 >= B_2 >= ... and S_1 <= S_2 <= ...
  std::vector<double> sorted_buyer_values() const;
  std::vector<double> sorted_seller_values() const;

  bool operator==(const ValuationProfile&) const = default;
};

/// Average-price clearing: buyers sorted by bid descending, sellers by ask
/// ascending (equal bids: lower id first). k is the largest index whose k-th
/// buyer bid is >= the k-th seller ask; the price is the mean of that pair.
/// Throws InvalidInput on an empty side or a non-finite bid.
RoundOutcome clear_market(const BidProfile& bids);

/// Relaxed clearing against an unlimited pool at a posted price: every buyer
/// bidding >= price and every seller asking <= price trades at price.
RoundOutcome clear_fixed_price(const BidProfile& bids, double price);

/// Clears the market under truthful bids and derives K*, p*, the optimal sets and the gap.
ValuationProfile oracle_solution(std::vector<double> buyer_values, std::vector<double> seller_values);

// Allocation-free clearing used by the simulator. Keeps its buffers between
// calls; write results into a caller-owned RoundOutcome.
class Clearing {
 public:
  void clear(std::span<const double> buyer_bids, std::span<const double> seller_bids,
             RoundOutcome& out);
  void clear_fixed(std::span<const double> buyer_bids, std::span<const double> seller_bids,
                   double price, RoundOutcome& out);

 private:
  std::vector<std::size_t> buyer_order_;
  std::vector<std::size_t> seller_order_;
};

}  // namespace dauction
