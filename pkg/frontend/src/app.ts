/** Playground wiring: a prompt pane, an output log of blocks, and a
 * buffer editor that loads .disco sources into the session.
 *
 * One in-flight request per session; a lost session (404) transparently
 * becomes a fresh one with a visible notice; network failures show a
 * retry banner that re-submits the same line. */

import { Block, DiscoClient, HttpError } from "./api.js";
import { InputHistory } from "./history.js";
import { renderBlock, renderEcho, renderNotice } from "./render.js";

export interface PlaygroundElements {
  output: HTMLElement;
  input: HTMLInputElement;
  bufferName: HTMLInputElement;
  bufferText: HTMLTextAreaElement;
  loadButton: HTMLButtonElement;
}

export class Playground {
  sessionId: string | null = null;
  pending = false;
  readonly history = new InputHistory();

  constructor(
    private doc: Document,
    private els: PlaygroundElements,
    private client: DiscoClient,
  ) {
    els.input.addEventListener("keydown", (ev) => this.onKey(ev as KeyboardEvent));
    els.loadButton.addEventListener("click", () => {
      void this.loadBuffer();
    });
  }

  async start(): Promise<void> {
    this.sessionId = await this.client.createSession();
  }

  private onKey(ev: KeyboardEvent): void {
    if (ev.key === "Enter") {
      ev.preventDefault();
      void this.submitLine(this.els.input.value);
    } else if (ev.key === "ArrowUp") {
      const prev = this.history.previous(this.els.input.value);
      if (prev !== null) {
        this.els.input.value = prev;
        ev.preventDefault();
      }
    } else if (ev.key === "ArrowDown") {
      const next = this.history.next();
      if (next !== null) {
        this.els.input.value = next;
        ev.preventDefault();
      }
    }
  }

  async submitLine(line: string): Promise<void> {
    if (line.trim() === "" || this.pending) {
      return; // empty lines send nothing; one request in flight at a time
    }
    await this.request(line, () => this.client.sendLine(this.sessionId!, line), () => {
      this.history.push(line);
      this.els.input.value = "";
      this.appendChild(renderEcho(this.doc, line));
    });
  }

  async loadBuffer(): Promise<void> {
    if (this.pending) {
      return;
    }
    const name = this.els.bufferName.value.trim() || "buffer.disco";
    const contents = this.els.bufferText.value;
    await this.request(
      `:load ${name}`,
      () => this.client.loadBuffer(this.sessionId!, [{ name, contents }]),
      () => this.appendChild(renderEcho(this.doc, `:load ${name}`)),
    );
  }

  private async request(
    line: string,
    send: () => Promise<Block[]>,
    onStart: () => void,
  ): Promise<void> {
    this.pending = true;
    onStart();
    try {
      const blocks = await this.runWithSessionRecovery(send);
      for (const block of blocks) {
        this.appendChild(renderBlock(this.doc, block));
      }
    } catch (err) {
      this.showRetryBanner(line, err);
    } finally {
      this.pending = false;
      this.scrollOutput();
    }
  }

  private async runWithSessionRecovery(send: () => Promise<Block[]>): Promise<Block[]> {
    if (this.sessionId === null) {
      await this.start();
    }
    try {
      return await send();
    } catch (err) {
      if (err instanceof HttpError && err.status === 404) {
        this.appendChild(renderNotice(
          this.doc, "Session expired; started a new one.", "session"));
        this.sessionId = await this.client.createSession();
        return await send();
      }
      throw err;
    }
  }

  private showRetryBanner(line: string, err: unknown): void {
    const banner = this.doc.createElement("div");
    banner.className = "notice notice-retry";
    const label = this.doc.createElement("span");
    label.textContent = `Could not reach the server (${String(err)}). `;
    const button = this.doc.createElement("button");
    button.className = "retry-button";
    button.textContent = "Retry";
    button.addEventListener("click", () => {
      banner.remove();
      this.els.input.value = line;
      void this.submitLine(line);
    });
    banner.appendChild(label);
    banner.appendChild(button);
    this.appendChild(banner);
  }

  private appendChild(el: HTMLElement): void {
    this.els.output.appendChild(el);
  }

  private scrollOutput(): void {
    this.els.output.scrollTop = this.els.output.scrollHeight;
  }
}

export function mountPlayground(doc: Document, client?: DiscoClient): Playground {
  const els: PlaygroundElements = {
    output: doc.getElementById("output") as HTMLElement,
    input: doc.getElementById("prompt-input") as HTMLInputElement,
    bufferName: doc.getElementById("buffer-name") as HTMLInputElement,
    bufferText: doc.getElementById("buffer-text") as HTMLTextAreaElement,
    loadButton: doc.getElementById("load-button") as HTMLButtonElement,
  };
  return new Playground(doc, els, client ?? new DiscoClient());
}
