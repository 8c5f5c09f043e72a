// Scripted peer for the oracle line protocol.
//
//   stub_oracle <mode> [max_concurrency]
//   stub_oracle tcp <mode> [max_concurrency]   listens on 127.0.0.1, prints the port
//
// Modes: null, delete-first, error, garbage, silent, crash, bad-handshake, shuffle.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

using nlohmann::json;

class Peer {
 public:
  Peer(FILE* in, FILE* out) : in_(in), out_(out) {}

  bool read_line(std::string& line) {
    line.clear();
    for (int c; (c = std::fgetc(in_)) != EOF;) {
      if (c == '\n') return true;
      line.push_back(static_cast<char>(c));
    }
    return !line.empty();
  }

  void write_line(const std::string& line) {
    std::lock_guard lock(mu_);
    std::fputs(line.c_str(), out_);
    std::fputc('\n', out_);
    std::fflush(out_);
  }

 private:
  FILE* in_;
  FILE* out_;
  std::mutex mu_;
};

std::string respond(const std::string& mode, const json& request) {
  json reply = {{"id", request.at("id")}};
  if (mode == "error") {
    reply["error"] = "refused";
  } else if (mode == "garbage") {
    reply["output"] = "<9><9><del>";
  } else if (mode == "delete-first") {
    const int a = request.at("region").at("a").get<int>();
    const bool empty = request.at("statuses").at(static_cast<std::size_t>(a - 1)) == "empty";
    reply["output"] = empty ? "<1><del>" : "";
  } else {
    reply["output"] = "";
  }
  return reply.dump();
}

int serve(Peer& peer, const std::string& mode, int concurrency) {
  if (mode == "bad-handshake") {
    peer.write_line(R"({"proto":"other/9","max_concurrency":1})");
  } else {
    peer.write_line(json{{"proto", "coedit-oracle/1"}, {"max_concurrency", concurrency}}.dump());
  }
  std::vector<std::thread> workers;
  std::mt19937 rng(7);
  std::string line;
  while (peer.read_line(line)) {
    if (mode == "silent") continue;
    if (mode == "crash") std::_Exit(3);
    const json request = json::parse(line);
    if (mode == "shuffle") {
      const int delay = std::uniform_int_distribution<int>(0, 20)(rng);
      workers.emplace_back([&peer, request, delay, mode] {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        peer.write_line(respond("null", request));
      });
      continue;
    }
    peer.write_line(respond(mode, request));
  }
  for (auto& w : workers) w.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << "usage: stub_oracle [tcp] <mode> [max_concurrency]\n";
    return 1;
  }
  const bool tcp = args[0] == "tcp";
  if (tcp) args.erase(args.begin());
  const std::string mode = args.at(0);
  const int concurrency = args.size() > 1 ? std::stoi(args[1]) : 1;

  if (!tcp) {
    Peer peer(stdin, stdout);
    return serve(peer, mode, concurrency);
  }

  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 1) != 0) {
    std::perror("stub_oracle");
    return 2;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  std::printf("%d\n", ntohs(addr.sin_port));
  std::fflush(stdout);
  const int fd = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (fd < 0) return 2;
  FILE* in = ::fdopen(fd, "r");
  FILE* out = ::fdopen(::dup(fd), "w");
  Peer peer(in, out);
  return serve(peer, mode, concurrency);
}
