#include "susacer/replay.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

namespace susacer {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint32_t n) : capacity_(capacity), n_(n) {
  SUSACER_CHECK(capacity >= 1, "capacity must be >= 1");
  SUSACER_CHECK(n >= 1 && n <= 64, "window must be in [1, 64]");
}

void ReplayBuffer::push(Transition tr) {
  SUSACER_CHECK(tr.p_eff > 0.0 && tr.p_eff <= 1.0, "p_eff outside (0,1]");
  SUSACER_CHECK(!(tr.terminal && tr.truncated), "terminal and truncated are exclusive");
  SUSACER_CHECK(!(!tr.fresh && tr.p_eff == 1.0), "sustained step with p_eff = 1");
  const std::uint64_t seq = next_seq();
  if (tr.fresh) fresh_index_.push_back(seq);
  data_.push_back(std::move(tr));
  if (data_.size() > capacity_) {
    data_.pop_front();
    first_seq_ += 1;
    if (!fresh_index_.empty() && fresh_index_.front() < first_seq_) fresh_index_.pop_front();
  }
}

const Transition& ReplayBuffer::at_seq(std::uint64_t seq) const {
  SUSACER_CHECK(seq >= first_seq_ && seq < next_seq(), "sequence number out of buffer");
  return data_[seq - first_seq_];
}

// A start in the unfinished tail is eligible only if its episode already
// ended within the recorded range.
bool ReplayBuffer::tail_eligible(std::uint64_t seq) const {
  const std::uint64_t end = next_seq();
  for (std::uint64_t q = seq; q < end && q < seq + n_; q++) {
    const Transition& t = at_seq(q);
    if (t.terminal || t.truncated) return true;
  }
  return false;
}

std::size_t ReplayBuffer::eligible_start_count() const {
  const std::uint64_t nseq = next_seq();
  auto split = std::partition_point(fresh_index_.begin(), fresh_index_.end(),
                                    [&](std::uint64_t q) { return q + n_ <= nseq; });
  std::size_t count = std::size_t(split - fresh_index_.begin());
  for (auto it = split; it != fresh_index_.end(); ++it)
    if (tail_eligible(*it)) count++;
  return count;
}

std::vector<std::uint64_t> ReplayBuffer::eligible_starts() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q : fresh_index_) {
    if (q + n_ <= next_seq() || tail_eligible(q)) out.push_back(q);
  }
  return out;
}

void ReplayBuffer::extract(std::uint64_t start_seq, Trajectory& out) const {
  out.steps.clear();
  const std::uint64_t end = next_seq();
  for (std::uint64_t q = start_seq; q < end && q < start_seq + n_; q++) {
    const Transition& t = at_seq(q);
    out.steps.push_back(&t);
    if (t.terminal || t.truncated) break;
  }
  SUSACER_CHECK(!out.steps.empty() && out.first().fresh, "trajectory must start fresh");
}

bool ReplayBuffer::sample_trajectory(Rng& rng, Trajectory& out) const {
  const std::uint64_t nseq = next_seq();
  auto prefix_end = std::partition_point(fresh_index_.begin(), fresh_index_.end(),
                                         [&](std::uint64_t q) { return q + n_ <= nseq; });
  std::size_t prefix_count = std::size_t(prefix_end - fresh_index_.begin());

  // Tail candidates are the most recent fresh steps without a full window.
  std::uint64_t tail[64];
  std::size_t tail_count = 0;
  for (auto it = prefix_end; it != fresh_index_.end(); ++it) {
    if (tail_eligible(*it)) {
      SUSACER_CHECK(tail_count < 64, "tail candidate overflow");
      tail[tail_count++] = *it;
    }
  }

  const std::size_t total = prefix_count + tail_count;
  if (total == 0) return false;
  const std::size_t k = rng.uniform_index(total);
  const std::uint64_t start = k < prefix_count ? fresh_index_[k] : tail[k - prefix_count];
  extract(start, out);
  return true;
}

std::uint64_t ReplayBuffer::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const unsigned char* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; i++) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  std::uint64_t fs = first_seq_;
  mix(&fs, sizeof fs);
  for (const Transition& t : data_) {
    mix(t.s.data(), t.s.size() * sizeof(double));
    mix(t.a.data(), t.a.size() * sizeof(double));
    mix(t.s_next.data(), t.s_next.size() * sizeof(double));
    mix(&t.reward, sizeof t.reward);
    mix(&t.p_eff, sizeof t.p_eff);
    mix(&t.base_logd, sizeof t.base_logd);
    mix(&t.run_len, sizeof t.run_len);
    mix(&t.t_global, sizeof t.t_global);
    unsigned char flags = (unsigned char)(t.terminal | (t.truncated << 1) | (t.fresh << 2));
    mix(&flags, 1);
  }
  return h;
}

void ReplayBuffer::dump(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  auto put_u64 = [f](std::uint64_t v) { std::fwrite(&v, sizeof v, 1, f); };
  auto put_f64 = [f](double v) { std::fwrite(&v, sizeof v, 1, f); };
  put_u64(0x3146554241535553ULL);  // "SUSABUF1" little-endian
  put_u64(data_.size());
  const std::uint64_t sdim = data_.empty() ? 0 : data_.front().s.size();
  const std::uint64_t adim = data_.empty() ? 0 : data_.front().a.size();
  put_u64(sdim);
  put_u64(adim);
  put_u64(first_seq_);
  for (const Transition& t : data_) {
    for (double v : t.s) put_f64(v);
    for (double v : t.a) put_f64(v);
    for (double v : t.s_next) put_f64(v);
    put_f64(t.reward);
    put_f64(t.p_eff);
    put_f64(t.base_logd);
    put_f64(double(t.run_len));
    put_f64(double(t.t_global));
    put_f64(double(t.terminal));
    put_f64(double(t.truncated));
    put_f64(double(t.fresh));
  }
  std::fclose(f);
}

}  // namespace susacer
