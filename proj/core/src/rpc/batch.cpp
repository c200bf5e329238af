#include "bebop/rpc/batch.hpp"

#include <future>
#include <thread>

namespace bebop::rpc {

BatchPlan plan_batch(const std::vector<BatchCall>& calls, const MethodKindLookup& kind_of) {
  BatchPlan plan;
  plan.layer_of.resize(calls.size());
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const BatchCall& c = calls[i];
    if (kind_of) {
      const auto kind = kind_of(c.method_id);
      if (kind == MethodKind::ClientStream || kind == MethodKind::Duplex) {
        throw Error(ErrorCode::MethodNotBatchable, "call " + std::to_string(i) + " uses a " +
                                                       std::string(method_kind_name(*kind)) +
                                                       " method, which cannot be batched");
      }
    }
    if (c.input_from < -1 || (c.input_from >= 0 && static_cast<std::size_t>(c.input_from) >= i)) {
      throw Error(ErrorCode::InvalidReference, "call " + std::to_string(i) + " reads from " +
                                                   std::to_string(c.input_from) +
                                                   "; input_from must be -1 or an earlier index");
    }
    const std::size_t layer = c.input_from < 0 ? 0 : plan.layer_of[static_cast<std::size_t>(c.input_from)] + 1;
    plan.layer_of[i] = layer;
    if (plan.layers.size() <= layer) plan.layers.resize(layer + 1);
    plan.layers[layer].push_back(i);
  }
  return plan;
}

Bytes forwarded_payload(const CallOutcome& from) {
  return from.streamed ? encode_payload_list(from.stream) : from.payload;
}

BatchResponse execute_batch(const BatchPlan& plan, const std::vector<BatchCall>& calls, const BatchInvoker& invoke,
                            const BatchOptions& options) {
  const auto expired = [&] { return options.deadline && deadline_expired(*options.deadline, options.clock()); };

  std::vector<CallOutcome> outcomes(calls.size());
  std::vector<std::promise<void>> done(calls.size());
  std::vector<std::shared_future<void>> finished;
  finished.reserve(calls.size());
  for (auto& p : done) finished.push_back(p.get_future().share());

  const auto run = [&](std::size_t i) {
    const BatchCall& call = calls[i];
    CallOutcome out;
    try {
      const CallOutcome* dep = nullptr;
      if (call.input_from >= 0) {
        const auto d = static_cast<std::size_t>(call.input_from);
        finished[d].wait();
        dep = &outcomes[d];
      }
      if (expired()) {
        out = CallOutcome::failure(Status::DeadlineExceeded, "batch deadline passed before the call started");
      } else if (dep && !dep->ok()) {
        out = CallOutcome::failure(Status::InvalidArgument,
                                   "call " + std::to_string(call.input_from) + " it depends on failed");
      } else {
        out = dep ? invoke(call, forwarded_payload(*dep)) : invoke(call, call.payload);
        if (expired()) out = CallOutcome::failure(Status::DeadlineExceeded, "batch deadline passed during the call");
      }
    } catch (const std::exception& e) {
      out = CallOutcome::failure(Status::Internal, e.what());
    }
    outcomes[i] = std::move(out);
    done[i].set_value();
  };

  if (calls.size() == 1) {
    run(0);
  } else {
    // Threads start in layer order, so every call of a layer is running or
    // waiting on its dependency before the next layer is touched.
    std::vector<std::thread> threads;
    threads.reserve(calls.size());
    for (const auto& layer : plan.layers) {
      for (std::size_t i : layer) threads.emplace_back(run, i);
    }
    for (auto& t : threads) t.join();
  }

  BatchResponse response;
  response.results.reserve(calls.size());
  for (std::size_t i = 0; i < calls.size(); ++i) {
    CallOutcome& o = outcomes[i];
    BatchResult r;
    r.call_id = calls[i].call_id;
    r.status = o.status;
    if (o.ok()) {
      r.payload = std::move(o.payload);
      r.stream_payloads = std::move(o.stream);
    }
    r.error_message = std::move(o.error_message);
    response.results.push_back(std::move(r));
  }
  return response;
}

}  // namespace bebop::rpc
