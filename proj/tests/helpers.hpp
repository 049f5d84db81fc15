#pragma once

#include <memory>
#include <vector>

#include "seqcover/mixing.hpp"

namespace testutil {

// Member that replays a fixed prediction sequence, ignoring features.
class ReplayCursor final : public seqcover::MemberCursor {
 public:
  explicit ReplayCursor(std::vector<double> out) : out_(std::move(out)) {}
  double next(const seqcover::Feature&) override { return out_.at(t_++); }
  std::unique_ptr<seqcover::MemberCursor> clone() const override { return std::make_unique<ReplayCursor>(*this); }

 private:
  std::vector<double> out_;
  std::size_t t_ = 0;
};

// rows[i] is the prediction sequence of expert i.
inline std::unique_ptr<seqcover::ExpertPool> replay_pool(const std::vector<std::vector<double>>& rows) {
  std::vector<std::unique_ptr<seqcover::MemberCursor>> m;
  for (const auto& r : rows) m.push_back(std::make_unique<ReplayCursor>(r));
  return std::make_unique<seqcover::ExplicitPool>(std::move(m));
}

inline std::vector<seqcover::Feature> ramp(std::size_t T) {
  std::vector<seqcover::Feature> xs;
  for (std::size_t t = 0; t < T; ++t) xs.emplace_back(static_cast<std::int64_t>(t));
  return xs;
}

}  // namespace testutil
