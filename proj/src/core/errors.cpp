#include "padsim/errors.hpp"

#include <cstdio>
#include <mutex>

namespace padsim {

namespace {

void stderr_sink(const char* message, void*) { std::fprintf(stderr, "warning: %s\n", message); }

std::mutex g_sink_mutex;
WarningSink g_sink = &stderr_sink;
void* g_sink_user = nullptr;

}  // namespace

void set_warning_sink(WarningSink sink, void* user) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = sink ? sink : &stderr_sink;
  g_sink_user = user;
}

void warn(const std::string& message) {
  std::lock_guard lock(g_sink_mutex);
  g_sink(message.c_str(), g_sink_user);
}

}  // namespace padsim
