// Submit flow: rasterize, stylize, retrieve, render only the latest response.

import type { RetrievalItem, ServiceClient } from "./api.js";
import { toBase64 } from "./png.js";
import { rasterizeSession } from "./raster.js";
import { createRequestGate } from "./requestGate.js";
import type { StrokeSession } from "./strokes.js";

export interface ResultPanelState {
  queryPng: Uint8Array | null;
  contourB64: string | null;
  results: RetrievalItem[];
  k: number;
  pending: boolean;
  error: string | null;
}

export const initialPanelState: ResultPanelState = {
  queryPng: null,
  contourB64: null,
  results: [],
  k: 10,
  pending: false,
  error: null,
};

export class SubmitController {
  private readonly client: ServiceClient;
  private readonly onChange: (state: ResultPanelState) => void;
  private readonly gate = createRequestGate();
  private state: ResultPanelState = { ...initialPanelState };

  constructor(client: ServiceClient, onChange: (state: ResultPanelState) => void) {
    this.client = client;
    this.onChange = onChange;
  }

  get current(): ResultPanelState {
    return this.state;
  }

  private update(patch: Partial<ResultPanelState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  /**
   * Send the session to the service. No request leaves for an empty session.
   * Out-of-order responses are dropped via the sequence gate; a failure shows
   * a banner but leaves the previous results (and the session) untouched.
   */
  async submit(session: StrokeSession, k: number, rasterSize = 256): Promise<void> {
    if (session.isEmpty) {
      return;
    }
    const token = this.gate.next();
    const png = rasterizeSession(session, rasterSize);
    const imageB64 = toBase64(png);
    this.update({ pending: true, error: null, k });
    try {
      const stylized = await this.client.stylize(imageB64);
      const retrieved = await this.client.retrieve(imageB64, k);
      if (!this.gate.isLatest(token)) {
        return; // a newer submit superseded this response
      }
      this.update({
        queryPng: png,
        contourB64: stylized.contour,
        results: retrieved.results,
        pending: false,
        error: null,
      });
    } catch (err) {
      if (!this.gate.isLatest(token)) {
        return;
      }
      const message = err instanceof Error ? err.message : String(err);
      this.update({ pending: false, error: message });
    }
  }
}
