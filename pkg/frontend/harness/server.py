#!/usr/bin/env python3
"""Local replay harness: serves the fixture payloads at story-shaped paths
plus a page whose buttons fire real XHRs at them, so the extension can be
exercised end-to-end in a browser without touching any live platform.

Usage:
    python3 frontend/harness/server.py [--port 8766]

Then, in the extension options, add the harness patterns printed at startup,
enable capture, open http://127.0.0.1:<port>/ and click the replay buttons.
"""
import argparse
import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"

ROUTES = {
    "/api/v1/feed/reels_media/": "fx_reels_3users.json",
    "/api/v1/highlights/8021/highlights_tray/": "fx_highlight_tray.json",
    "/api/v1/feed/reels_tray/": "fx_tray.json",
}

PAGE = """<!DOCTYPE html>
<html>
  <head><meta charset="utf-8"><title>storytide replay harness</title>
  <style>body{font:14px system-ui;margin:40px auto;max-width:560px}button{display:block;margin:8px 0;padding:8px 14px}</style>
  </head>
  <body>
    <h1>storytide replay harness</h1>
    <p>Each button fires a real XHR at a story-shaped path on this server.
       With the extension enabled (and its patterns including this origin),
       every response below should appear in the daemon archive.</p>
    <button onclick="replay('/api/v1/feed/reels_media/?reel_ids=8021%2C8022%2C8023')">Replay reels payload (7 items)</button>
    <button onclick="replay('/api/v1/highlights/8021/highlights_tray/')">Replay highlight payload (3 items)</button>
    <button onclick="replay('/api/v1/feed/reels_tray/')">Replay tray payload</button>
    <pre id="log"></pre>
    <script>
      function replay(path) {
        const xhr = new XMLHttpRequest();
        xhr.open("GET", path);
        xhr.onload = () => {
          document.getElementById("log").textContent +=
            path + " -> " + xhr.status + " (" + xhr.responseText.length + " bytes)\\n";
        };
        xhr.send();
      }
    </script>
  </body>
</html>
"""


class Handler(BaseHTTPRequestHandler):
    def do_GET(self):
        path = self.path.split("?")[0]
        if path == "/":
            body = PAGE.encode("utf-8")
            content_type = "text/html; charset=utf-8"
        elif path in ROUTES:
            body = (FIXTURES / ROUTES[path]).read_bytes()
            content_type = "application/json"
        else:
            self.send_response(404)
            self.end_headers()
            return
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):
        print(f"harness: {self.path}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8766)
    args = parser.parse_args()
    patterns = [
        {"pattern": f"^http://127\\.0\\.0\\.1:{args.port}{path}", "kind": kind}
        for path, kind in (
            ("/api/v1/feed/reels_tray/", "story_tray"),
            ("/api/v1/feed/reels_media/", "reel_media"),
            ("/api/v1/highlights/.*", "highlight"),
        )
    ]
    print(f"harness on http://127.0.0.1:{args.port}/")
    print("add these to the extension's pattern mirror (options page):")
    print(json.dumps({"patterns": patterns}, indent=2))
    ThreadingHTTPServer(("127.0.0.1", args.port), Handler).serve_forever()


if __name__ == "__main__":
    main()
