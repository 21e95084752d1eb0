#include "backends/driver.hpp"

namespace northpole::backends {

RunStats run_backend(Backend backend, const santa::ScenarioConfig& cfg, trace::EventSink* sink,
                     const DriverOptions& opts) {
  switch (backend) {
    case Backend::Guards:
      return run_guards(cfg, sink, opts);
    case Backend::Semaphores:
      return run_semaphores(cfg, sink, opts);
    case Backend::Channels:
      return run_channels(cfg, sink, opts);
    case Backend::Monitor:
      return run_monitor(cfg, sink, opts);
  }
  throw std::invalid_argument("unknown backend");
}

}  // namespace northpole::backends
