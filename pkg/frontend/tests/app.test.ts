/** Playground behavior against a scripted client: request serialization,
 * empty-line suppression, session recovery, and the retry banner. */

import { beforeEach, describe, expect, it } from "vitest";

import type { Block, FileBuffer } from "../src/api.js";
import { DiscoClient, HttpError } from "../src/api.js";
import { Playground, PlaygroundElements, mountPlayground } from "../src/app.js";

const SHELL = `
  <div id="output"></div>
  <input id="prompt-input" type="text">
  <input id="buffer-name" type="text" value="scratch.disco">
  <textarea id="buffer-text"></textarea>
  <button id="load-button"></button>
`;

class ScriptedClient extends DiscoClient {
  sessions = 0;
  sent: string[] = [];
  loaded: FileBuffer[][] = [];
  failNext: number | Error | null = null;
  respondWith: Block[] = [{ kind: "value", text: "2" }];
  private resolvers: (() => void)[] = [];
  hold = false;

  override async createSession(): Promise<string> {
    this.sessions += 1;
    return `session-${this.sessions}`;
  }

  override async sendLine(_sid: string, line: string): Promise<Block[]> {
    if (this.failNext instanceof Error) {
      const err = this.failNext;
      this.failNext = null;
      throw err;
    }
    if (typeof this.failNext === "number") {
      const status = this.failNext;
      this.failNext = null;
      throw new HttpError(status, "scripted failure");
    }
    this.sent.push(line);
    if (this.hold) {
      await new Promise<void>((resolve) => this.resolvers.push(resolve));
    }
    return this.respondWith;
  }

  override async loadBuffer(_sid: string, files: FileBuffer[]): Promise<Block[]> {
    this.loaded.push(files);
    return this.respondWith;
  }

  release(): void {
    for (const r of this.resolvers.splice(0)) r();
  }
}

function setup(): { playground: Playground; client: ScriptedClient } {
  document.body.innerHTML = SHELL;
  const client = new ScriptedClient();
  const playground = mountPlayground(document, client);
  return { playground, client };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("Playground", () => {
  it("sends a line and renders echo plus blocks", async () => {
    const { playground, client } = setup();
    await playground.start();
    await playground.submitLine("1 + 1");
    expect(client.sent).toEqual(["1 + 1"]);
    const output = document.getElementById("output")!;
    expect(output.querySelector(".echo-text")!.textContent).toBe("Disco> 1 + 1");
    expect(output.querySelector(".block-value pre")!.textContent).toBe("2");
  });

  it("sends nothing for an empty line", async () => {
    const { playground, client } = setup();
    await playground.start();
    await playground.submitLine("   ");
    expect(client.sent).toEqual([]);
  });

  it("allows at most one in-flight request per session", async () => {
    const { playground, client } = setup();
    await playground.start();
    client.hold = true;
    const first = playground.submitLine("slow");
    await playground.submitLine("second while pending");
    expect(client.sent).toEqual(["slow"]);
    client.hold = false;
    client.release();
    await first;
    await playground.submitLine("after");
    expect(client.sent).toEqual(["slow", "after"]);
  });

  it("recovers from an expired session with a notice", async () => {
    const { playground, client } = setup();
    await playground.start();
    expect(playground.sessionId).toBe("session-1");
    client.failNext = 404;
    await playground.submitLine("1 + 1");
    expect(playground.sessionId).toBe("session-2");
    expect(client.sent).toEqual(["1 + 1"]);
    const notice = document.querySelector(".notice-session")!;
    expect(notice.textContent).toContain("new one");
  });

  it("shows a retry banner on network failure and retries the line", async () => {
    const { playground, client } = setup();
    await playground.start();
    client.failNext = new TypeError("fetch failed");
    await playground.submitLine("2 + 2");
    const banner = document.querySelector(".notice-retry")!;
    expect(banner).toBeTruthy();
    (banner.querySelector("button.retry-button") as HTMLButtonElement).click();
    await new Promise((r) => setTimeout(r, 0));
    expect(client.sent).toEqual(["2 + 2"]);
  });

  it("loads the editor buffer and keeps its contents", async () => {
    const { playground, client } = setup();
    await playground.start();
    const text = document.getElementById("buffer-text") as HTMLTextAreaElement;
    const name = document.getElementById("buffer-name") as HTMLInputElement;
    text.value = "v : N\nv = 2\n";
    name.value = "v.disco";
    await playground.loadBuffer();
    expect(client.loaded).toEqual([[{ name: "v.disco", contents: "v : N\nv = 2\n" }]]);
    expect(text.value).toBe("v : N\nv = 2\n");
  });

  it("navigates history with arrow keys", async () => {
    const { playground } = setup();
    await playground.start();
    await playground.submitLine("first");
    await playground.submitLine("second");
    const input = document.getElementById("prompt-input") as HTMLInputElement;
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowUp", bubbles: true }));
    expect(input.value).toBe("second");
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowUp", bubbles: true }));
    expect(input.value).toBe("first");
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowDown", bubbles: true }));
    expect(input.value).toBe("second");
  });
});
